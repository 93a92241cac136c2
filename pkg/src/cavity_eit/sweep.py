"""Parameter sweeps, spectrum records, extrema analysis, truncation studies.

Sweeps are quasi-static: one independent steady state per grid point (every
relaxation rate far exceeds any realistic scan speed).  Points are solved
concurrently where possible but always assembled by grid index, so a given
spec produces bit-identical records on every run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import (
    CapacityError,
    ConfigError,
    DegenerateSteadyStateError,
    EdgeExtremumError,
    SteadyStateConvergenceError,
)
from .liouville import steady_state
from .model import (
    TWO_PI,
    PhysicsParams,
    build_model,
    drive_amplitude,
    mean_cavity_amplitude,
    mean_photon_number,
    three_level_model,
    two_level_model,
)
from .semiclassical import atomic_response, transmission_semiclassical

ENGINE_MASTER_EQUATION = "me"
ENGINE_SEMICLASSICAL = "sc"
_ENGINES = (ENGINE_MASTER_EQUATION, ENGINE_SEMICLASSICAL)

VAR_TWO_PHOTON = "two_photon_delta"
VAR_PROBE_CAVITY = "probe_cavity_detuning"
_VARIABLES = (VAR_TWO_PHOTON, VAR_PROBE_CAVITY)

_SCHEMES = ("five", "three", "two")
_BUILDERS = {"five": build_model, "three": three_level_model, "two": two_level_model}

DEFAULT_SWEEP_START = -0.9
DEFAULT_SWEEP_STOP = 1.7
DEFAULT_SWEEP_POINTS = 261


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: which variable, window (linear MHz), grid size, engines."""

    variable: str
    start: float
    stop: float
    n_points: int
    base_params: PhysicsParams
    engines: tuple[str, ...] = (ENGINE_MASTER_EQUATION,)
    level_scheme: str = "five"

    def __post_init__(self):
        object.__setattr__(self, "engines", tuple(self.engines))
        if self.variable not in _VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}")
        if not self.start < self.stop:
            raise ConfigError("sweep window needs start < stop")
        if self.n_points < 2:
            raise ConfigError("a sweep needs at least 2 points")
        if not self.engines:
            raise ConfigError("at least one engine is required")
        for engine in self.engines:
            if engine not in _ENGINES:
                raise ConfigError(f"unknown engine {engine!r}")
        if len(set(self.engines)) != len(self.engines):
            raise ConfigError("duplicate engines in sweep spec")
        if ENGINE_SEMICLASSICAL in self.engines and self.variable != VAR_TWO_PHOTON:
            raise ConfigError("the semiclassical engine only sweeps the two-photon detuning")
        if self.level_scheme not in _SCHEMES:
            raise ConfigError(f"unknown level scheme {self.level_scheme!r}")


@dataclass(frozen=True)
class SpectrumRecord:
    """One sweep point from one engine.

    ``sweep_value`` is in linear MHz.  ``transmission_rel`` is the coherent
    relative transmission; ``photon_number`` is the total intracavity
    photon number (master equation) or its coherent-response equivalent
    (closed-form engine).  The absorption/dispersion parts (rad/us) are
    filled by the closed-form engine and the residual by the
    master-equation engine.
    """

    sweep_value: float
    transmission_rel: float
    photon_number: float
    absorption_part: float | None
    dispersion_part: float | None
    residual_norm: float | None
    engine: str
    converged: bool = True


def grid_points(spec: SweepSpec) -> np.ndarray:
    return np.linspace(spec.start, spec.stop, spec.n_points)


def _point_params(spec: SweepSpec, value: float) -> PhysicsParams:
    field = "delta" if spec.variable == VAR_TWO_PHOTON else "delta_p_cav"
    return replace(spec.base_params, **{field: float(value)})


def _solve_point(spec: SweepSpec, value: float, eta: float, t0: float, tol: float) -> SpectrumRecord:
    params = _point_params(spec, value)
    builder = _BUILDERS[spec.level_scheme]
    try:
        model = builder(params, drive_eta=eta)
        solution = steady_state(model, tol)
        converged = True
    except SteadyStateConvergenceError as exc:
        if exc.solution is None:
            raise
        solution = exc.solution
        converged = False
    except (CapacityError, DegenerateSteadyStateError) as exc:
        raise type(exc)(f"sweep point {spec.variable} = {value} MHz: {exc}") from exc
    photons = max(mean_photon_number(solution.rho), 0.0)
    coherent = abs(mean_cavity_amplitude(solution.rho)) ** 2
    return SpectrumRecord(
        sweep_value=float(value),
        transmission_rel=coherent / t0,
        photon_number=photons,
        absorption_part=None,
        dispersion_part=None,
        residual_norm=solution.residual_norm,
        engine=ENGINE_MASTER_EQUATION,
        converged=converged,
    )


def _semiclassical_point(spec: SweepSpec, value: float, t0: float) -> SpectrumRecord:
    params = spec.base_params
    # The differential light shift sits on g1 in the full model, so the
    # formula sees the shifted two-photon detuning.
    delta_eff = TWO_PI * (value + params.light_shift)
    response = atomic_response(params, delta_eff)
    trans = transmission_semiclassical(params, delta_eff, params.n_atoms)
    return SpectrumRecord(
        sweep_value=float(value),
        transmission_rel=trans,
        photon_number=trans * t0,
        absorption_part=response.absorption_part,
        dispersion_part=response.dispersion_part,
        residual_norm=None,
        engine=ENGINE_SEMICLASSICAL,
        converged=True,
    )


def _worker_count(max_workers: int | None, n_tasks: int) -> int:
    if max_workers is None:
        max_workers = min(4, os.cpu_count() or 1)
    return max(1, min(max_workers, n_tasks))


def run_sweep(
    spec: SweepSpec,
    *,
    tol: float = 1e-9,
    max_workers: int | None = None,
) -> list[SpectrumRecord]:
    """Solve every grid point with every requested engine.

    Records are ordered by sweep value, then engine tag.  Master-equation
    points that miss the residual tolerance are recorded with
    ``converged=False`` instead of aborting the sweep; capacity and
    degeneracy problems abort with the offending point identified.
    """
    values = grid_points(spec)
    needs_me = ENGINE_MASTER_EQUATION in spec.engines
    t0 = spec.base_params.n_p
    if t0 < 1e-15:
        raise ConfigError("probe drive is zero; relative transmission is undefined")
    # Drive amplitude and normalization are pinned to the base parameters so
    # that probe-cavity scans trace the resonance line at fixed input power.
    eta = drive_amplitude(spec.base_params)

    me_records: list[SpectrumRecord] = []
    if needs_me:
        workers = _worker_count(max_workers, len(values))
        if workers == 1:
            me_records = [_solve_point(spec, v, eta, t0, tol) for v in values]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_solve_point, spec, v, eta, t0, tol) for v in values]
                me_records = [f.result() for f in futures]

    records: list[SpectrumRecord] = []
    for i, value in enumerate(values):
        for engine in sorted(spec.engines):
            if engine == ENGINE_MASTER_EQUATION:
                records.append(me_records[i])
            else:
                records.append(_semiclassical_point(spec, value, t0))
    return records


class ExtremaResult(NamedTuple):
    delta_max: float
    t_max: float
    delta_min: float
    t_min: float


def _refine(x: np.ndarray, y: np.ndarray, idx: int) -> tuple[float, float]:
    """Vertex of the parabola through three neighbouring grid points."""
    denom = y[idx - 1] - 2.0 * y[idx] + y[idx + 1]
    if denom == 0.0:
        return float(x[idx]), float(y[idx])
    step = x[idx + 1] - x[idx]
    shift = 0.5 * (y[idx - 1] - y[idx + 1]) / denom
    return float(x[idx] + shift * step), float(y[idx] - 0.125 * (y[idx - 1] - y[idx + 1]) ** 2 / denom)


def find_extrema(records: list[SpectrumRecord], *, allow_edge: bool = False) -> ExtremaResult:
    """Locate the dominant transmission maximum and minimum of one engine.

    Grid extrema are refined parabolically; an extremum on the window edge
    raises EdgeExtremumError unless ``allow_edge`` accepts the raw grid
    point (a plain resonance line has no interior minimum, for instance).
    """
    if len(records) < 5:
        raise ValueError("extrema search needs at least 5 points")
    engines = {r.engine for r in records}
    if len(engines) != 1:
        raise ValueError("extrema search mixes engines; filter the records first")
    ordered = sorted(records, key=lambda r: r.sweep_value)
    x = np.array([r.sweep_value for r in ordered])
    y = np.array([r.transmission_rel for r in ordered])

    def locate(idx: int) -> tuple[float, float]:
        if idx in (0, len(x) - 1):
            if allow_edge:
                return float(x[idx]), float(y[idx])
            raise EdgeExtremumError(
                f"extremum at sweep value {x[idx]} MHz lies on the window edge"
            )
        return _refine(x, y, idx)

    delta_max, t_max = locate(int(np.argmax(y)))
    delta_min, t_min = locate(int(np.argmin(y)))
    return ExtremaResult(delta_max, t_max, delta_min, t_min)


class TruncationRow(NamedTuple):
    n_max: int
    delta_mhz: float
    transmission_rel: float
    photon_number: float


@dataclass(frozen=True)
class ConvergenceStudy:
    """Transmission vs Fock truncation at a handful of two-photon detunings."""

    n_max_list: tuple[int, ...]
    deltas_mhz: tuple[float, ...]
    rows: tuple[TruncationRow, ...]
    converged: bool
    threshold: float

    def transmission(self, n_max: int, delta_mhz: float) -> float:
        for row in self.rows:
            if row.n_max == n_max and row.delta_mhz == delta_mhz:
                return row.transmission_rel
        raise KeyError((n_max, delta_mhz))

    def change(self, n_low: int, n_high: int, delta_mhz: float) -> float:
        return self.transmission(n_high, delta_mhz) - self.transmission(n_low, delta_mhz)

    @property
    def last_changes(self) -> dict[float, float]:
        """Per-detuning change between the two largest truncations."""
        lo, hi = self.n_max_list[-2], self.n_max_list[-1]
        return {d: self.change(lo, hi, d) for d in self.deltas_mhz}


def convergence_study(
    params: PhysicsParams,
    n_max_list: list[int],
    deltas_mhz: list[float] | None = None,
    *,
    tol: float = 1e-9,
    threshold: float = 0.01,
) -> ConvergenceStudy:
    """Solve the full model at each truncation and tabulate T/T0 per detuning.

    Flags non-convergence when the change between the two largest
    truncations exceeds ``threshold`` at any detuning.  With a zero probe
    drive the raw photon number (identically zero) is tabulated instead of
    the undefined transmission ratio.
    """
    n_max_list = [int(n) for n in n_max_list]
    if len(n_max_list) < 2:
        raise ConfigError("a truncation study needs at least two n_max values")
    if any(b <= a for a, b in zip(n_max_list, n_max_list[1:])):
        raise ConfigError("n_max values must be strictly ascending")
    if deltas_mhz is None:
        abs_peak = params.omega_con**2 / (4.0 * params.delta_p) if params.delta_p else None
        deltas_mhz = [0.0, 1.5] if abs_peak is None else [0.0, abs_peak, 1.5]
    deltas_mhz = [float(d) for d in deltas_mhz]

    rows = []
    for n_max in n_max_list:
        for delta in deltas_mhz:
            point = replace(params, n_max=n_max, delta=delta)
            solution = steady_state(build_model(point), tol)
            photons = max(mean_photon_number(solution.rho), 0.0)
            coherent = abs(mean_cavity_amplitude(solution.rho)) ** 2
            trans = coherent / params.n_p if params.n_p > 0 else photons
            rows.append(TruncationRow(n_max, delta, trans, photons))

    study = ConvergenceStudy(
        n_max_list=tuple(n_max_list),
        deltas_mhz=tuple(deltas_mhz),
        rows=tuple(rows),
        converged=True,
        threshold=threshold,
    )
    worst = max(abs(c) for c in study.last_changes.values())
    if worst > threshold:
        study = replace(study, converged=False)
    return study
