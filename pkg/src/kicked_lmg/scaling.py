"""Power-law tables and fits across kick strength and system size.

The chain strength K grows as a power of the kick strength (linearly
for the primary 1:1 chain, quadratically for the 2:1 chain), and the
validity edge of the resonance-assisted splitting regime shrinks as a
power of the effective Planck constant. Both laws are measured here by
sweeping the extraction pipeline and fitting straight lines in log-log
coordinates (natural logarithm throughout).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .cache import cached_spectrum
from .errors import FitError, KickedLmgError, TrackingLostError
from .extraction import (
    epsilon_max,
    epsilon_max_crossing,
    extract_island,
)
from .floquet import (
    FloquetBuilder,
    diagonalize_floquet,
    identify_resonant_pair,
    scaled_splitting,
)
from .model import (
    ModelParams,
    build_spin_matrices,
    calibrate_tau,
    select_resonant_index,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    n_points: int


def loglog_fit(x, y) -> FitResult:
    """Least-squares line through (ln x, ln y).

    Needs at least four strictly positive, finite points; anything else
    raises FitError rather than returning a silently useless fit.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("x and y must be 1-d arrays of equal length")
    if x.size < 4:
        raise FitError(f"need at least 4 points for a power-law fit, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FitError("fit input contains non-finite values")
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("fit input must be strictly positive for log-log regression")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    return FitResult(
        slope=float(coef[0]),
        intercept=float(coef[1]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_points=int(x.size),
    )


@dataclass(frozen=True)
class ChainRow:
    """One kick strength in a classical chain table."""

    epsilon: float
    s_plus: float
    s_minus: float
    trace: float
    det: float
    action: float
    mass: float
    strength: float
    status: str
    message: str = ""


def chain_table(
    base: ModelParams,
    epsilons,
    resonant_energy: float | None = None,
    **extract_kwargs,
) -> list[ChainRow]:
    """Run the island extraction at each kick strength.

    Failures are recorded as rows with status 'failed' instead of
    aborting the sweep; callers decide how many losses they tolerate.
    """
    rows = []
    for eps in np.asarray(epsilons, dtype=float):
        p = ModelParams(
            j=base.j,
            omega0=base.omega0,
            gamma_x=base.gamma_x,
            tau=base.tau,
            epsilon=float(eps),
            r=base.r,
            s=base.s,
        )
        try:
            res = extract_island(p, resonant_energy=resonant_energy, **extract_kwargs)
        except KickedLmgError as exc:
            log.warning("extraction failed at epsilon=%g: %s", eps, exc)
            rows.append(
                ChainRow(
                    epsilon=float(eps),
                    s_plus=math.nan,
                    s_minus=math.nan,
                    trace=math.nan,
                    det=math.nan,
                    action=math.nan,
                    mass=math.nan,
                    strength=math.nan,
                    status="failed",
                    message=str(exc),
                )
            )
            continue
        pend = res.pendulum
        rows.append(
            ChainRow(
                epsilon=float(eps),
                s_plus=res.geometry.s_plus,
                s_minus=res.geometry.s_minus,
                trace=res.monodromy.trace,
                det=res.monodromy.det,
                action=pend.I_rs,
                mass=pend.m_rs,
                strength=pend.K_rs,
                status="ok",
            )
        )
    return rows


def strength_fit(rows: list[ChainRow]) -> FitResult:
    """Power-law fit of the chain strength against kick strength."""
    ok = [r for r in rows if r.status == "ok"]
    return loglog_fit([r.epsilon for r in ok], [abs(r.strength) for r in ok])


def area_fit(rows: list[ChainRow]) -> FitResult:
    """Power-law fit of the separatrix area difference."""
    ok = [r for r in rows if r.status == "ok"]
    return loglog_fit([r.epsilon for r in ok], [r.s_plus - r.s_minus for r in ok])


@dataclass(frozen=True)
class ValidityRow:
    j: float
    hbar: float
    eps_max: float
    eps_crossing: float | None = None


def validity_edge_table(
    j_list, amplitude: float, exponent: float, mass: float, r: int
) -> list[ValidityRow]:
    """Analytic validity edge of the resonance-assisted regime per J."""
    rows = []
    for j in j_list:
        hbar = 1.0 / float(j)
        rows.append(
            ValidityRow(
                j=float(j),
                hbar=hbar,
                eps_max=epsilon_max(amplitude, exponent, mass, r, hbar),
            )
        )
    return rows


def validity_edge_fit(rows: list[ValidityRow]) -> FitResult:
    return loglog_fit([r.j for r in rows], [r.eps_max for r in rows])


def crossing_vs_analytic(
    epsilons, strengths, masses, r: int, hbar: float, amplitude: float, exponent: float
) -> tuple[float | None, float]:
    """Numeric crossing of the two splitting laws next to the analytic
    edge; logs a diagnostic when they disagree by more than 50%."""
    analytic = epsilon_max(amplitude, exponent, np.mean(masses), r, hbar)
    crossing = epsilon_max_crossing(epsilons, strengths, masses, r, hbar)
    if crossing is not None and abs(crossing - analytic) > 0.5 * analytic:
        log.warning(
            "validity-edge routes disagree: crossing %g vs analytic %g", crossing, analytic
        )
    return crossing, analytic


@dataclass(frozen=True)
class SplittingRow:
    """One kick strength in a quantum doublet-splitting sweep."""

    j: float
    r: int
    s: int
    tau: float
    epsilon: float
    delta_phi: float
    delta_scaled: float
    overlap: float
    status: str
    message: str = ""


@dataclass(frozen=True)
class QuantumSweep:
    j: float
    r: int
    s: int
    resonant_index: int
    tau: float
    rows: list[SplittingRow]


def quantum_splitting_sweep(
    j: float,
    r: int,
    s: int,
    t_resonant: float,
    epsilons,
    tau: float | None = None,
    mode: str = "continuation",
    overlap_floor: float = 0.5,
    cache_dir=None,
) -> QuantumSweep:
    """Doublet splitting of the resonant pair across kick strengths.

    The kick period defaults to the calibrated value that makes the
    unkicked doublet exactly degenerate; pass tau to override. Tracking
    failures terminate a continuation sweep, so rows beyond the lost
    strength are marked 'lost'.
    """
    if mode not in ("subspace", "continuation"):
        raise ValueError(f"unknown tracking mode {mode!r}")
    spectrum = cached_spectrum(ModelParams(j=j, r=r, s=s), cache_dir=cache_dir)
    k_r = select_resonant_index(spectrum, t_resonant, r)
    if tau is None:
        tau = calibrate_tau(spectrum, k_r, r, s)
    ops = build_spin_matrices(j)
    builder = FloquetBuilder(spectrum, ops)
    target = spectrum.states[:, [k_r, k_r + r]].astype(complex)
    rows = []
    lost = False
    for eps in np.asarray(epsilons, dtype=float):
        if lost:
            rows.append(
                SplittingRow(
                    j=j, r=r, s=s, tau=tau, epsilon=float(eps),
                    delta_phi=math.nan, delta_scaled=math.nan, overlap=math.nan,
                    status="lost", message="tracking lost at a smaller kick strength",
                )
            )
            continue
        quasi = diagonalize_floquet(builder.matrix(tau, float(eps)))
        try:
            pair = identify_resonant_pair(quasi, target, overlap_floor)
        except TrackingLostError as exc:
            log.warning("doublet tracking lost at epsilon=%g: %s", eps, exc)
            lost = mode == "continuation"
            rows.append(
                SplittingRow(
                    j=j, r=r, s=s, tau=tau, epsilon=float(eps),
                    delta_phi=math.nan, delta_scaled=math.nan, overlap=math.nan,
                    status="lost", message=str(exc),
                )
            )
            continue
        if mode == "continuation":
            target = quasi.states[:, [pair.index_a, pair.index_b]]
        rows.append(
            SplittingRow(
                j=j,
                r=r,
                s=s,
                tau=tau,
                epsilon=float(eps),
                delta_phi=pair.delta_phi,
                delta_scaled=scaled_splitting(pair.delta_phi, j, tau),
                overlap=min(pair.overlap_a, pair.overlap_b),
                status="ok",
            )
        )
    return QuantumSweep(j=j, r=r, s=s, resonant_index=k_r, tau=tau, rows=rows)


@dataclass(frozen=True)
class SweepRow:
    """Quantum splitting next to both pendulum predictions, scaled units."""

    epsilon: float
    delta_quantum_scaled: float
    delta_rat: float
    delta_harm: float
    status: str


@dataclass(frozen=True)
class SplittingCurve:
    """Joined quantum/classical splitting comparison for one spin size."""

    j: float
    r: int
    s: int
    tau: float
    rows: list[SweepRow]
    epsilon_max_estimate: float | None


def build_splitting_curve(
    qsweep: QuantumSweep, chain: list[ChainRow]
) -> SplittingCurve:
    """Join a quantum sweep with a classical chain table on kick strength.

    The chain rows carry no spin size: the measured strength enters the
    resonance-assisted prediction directly as 2|K| while the harmonic
    one picks up one power of 1/J. The validity-edge estimate comes from
    the crossing of the two predictions on the usable rows.
    """
    hbar = 1.0 / qsweep.j
    by_eps = {row.epsilon: row for row in chain}
    rows = []
    for q in qsweep.rows:
        c = by_eps.get(q.epsilon)
        if c is None or c.status != "ok":
            status = "failed" if q.status == "ok" else q.status
            rows.append(
                SweepRow(
                    epsilon=q.epsilon,
                    delta_quantum_scaled=q.delta_scaled,
                    delta_rat=math.nan,
                    delta_harm=math.nan,
                    status=status,
                )
            )
            continue
        rows.append(
            SweepRow(
                epsilon=q.epsilon,
                delta_quantum_scaled=q.delta_scaled,
                delta_rat=2.0 * abs(c.strength),
                delta_harm=hbar * qsweep.r * math.sqrt(2.0 * abs(c.strength) / c.mass),
                status=q.status,
            )
        )
    ok = [c for c in chain if c.status == "ok"]
    estimate = None
    if len(ok) >= 2:
        estimate = epsilon_max_crossing(
            np.array([c.epsilon for c in ok]),
            np.array([abs(c.strength) for c in ok]),
            np.array([c.mass for c in ok]),
            qsweep.r,
            hbar,
        )
    return SplittingCurve(
        j=qsweep.j,
        r=qsweep.r,
        s=qsweep.s,
        tau=qsweep.tau,
        rows=rows,
        epsilon_max_estimate=estimate,
    )


def sweep_splitting(
    j_list,
    epsilons,
    r: int = 1,
    s: int = 1,
    t_resonant: float = 8.0,
    omega0: float = 1.0,
    gamma_x: float = -0.95,
    resonant_energy: float | None = None,
    mode: str = "continuation",
    overlap_floor: float = 0.5,
    cache_dir=None,
    **extract_kwargs,
) -> dict[float, SplittingCurve]:
    """Splitting comparison across spin sizes on a shared kick grid.

    The classical chain table does not depend on J, so it is computed
    once at the resonant kick period s * t_resonant / r and joined onto
    every quantum sweep.
    """
    tau_ref = s * t_resonant / r
    base = ModelParams(
        j=float(j_list[0]), omega0=omega0, gamma_x=gamma_x, tau=tau_ref, r=r, s=s
    )
    chain = chain_table(base, epsilons, resonant_energy=resonant_energy, **extract_kwargs)
    curves: dict[float, SplittingCurve] = {}
    for j in j_list:
        qs = quantum_splitting_sweep(
            float(j),
            r,
            s,
            t_resonant,
            epsilons,
            mode=mode,
            overlap_floor=overlap_floor,
            cache_dir=cache_dir,
        )
        curves[float(j)] = build_splitting_curve(qs, chain)
    return curves


def scaling_epsilon_max(
    chain: list[ChainRow], j_list, r: int
) -> tuple[list[ValidityRow], FitResult]:
    """Validity edge of the resonance-assisted regime against spin size.

    Fits the strength law K = A eps^p on the usable chain rows, then
    evaluates the analytic edge per J alongside the numeric crossing of
    the two splitting predictions; a disagreement beyond 50% is logged
    as a diagnostic. The returned fit is eps_max against J.
    """
    fit = strength_fit(chain)
    amplitude = math.exp(fit.intercept)
    exponent = fit.slope
    ok = [c for c in chain if c.status == "ok"]
    eps = np.array([c.epsilon for c in ok])
    ks = np.array([abs(c.strength) for c in ok])
    ms = np.array([c.mass for c in ok])
    mean_mass = float(np.mean(ms))
    rows = []
    for j in j_list:
        hbar = 1.0 / float(j)
        analytic = epsilon_max(amplitude, exponent, mean_mass, r, hbar)
        crossing = epsilon_max_crossing(eps, ks, ms, r, hbar)
        if crossing is not None and abs(crossing - analytic) > 0.5 * analytic:
            log.warning(
                "validity-edge routes disagree at J=%s: crossing %g vs analytic %g",
                j,
                crossing,
                analytic,
            )
        rows.append(
            ValidityRow(j=float(j), hbar=hbar, eps_max=analytic, eps_crossing=crossing)
        )
    edge_fit = loglog_fit([row.j for row in rows], [row.eps_max for row in rows])
    return rows, edge_fit
