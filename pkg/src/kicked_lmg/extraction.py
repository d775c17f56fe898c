"""Island-chain geometry and effective pendulum parameters.

A nonlinear resonance of the kicked map shows up as a chain of r
islands around a periodic orbit. Near the chain the r-step dynamics is
an effective pendulum in the slow angle, characterized by a strength
K and a mass m. Both follow from two measurable quantities:

    a = (S_plus - S_minus) / 16      (area between separatrix branches)
    b = arccos(tr M / 2) / (r^2 tau) (small-oscillation rate at center)

with K = a b / 2 and m = a / b. S_plus and S_minus are the areas (in
the z >= -1 sense) under the outer and inner separatrix branches over
a full angle cycle, M is the monodromy matrix of the r-step map at the
island center, and the 1/16 holds for every r because the chain has r
lobes each 1/r as wide. The mean (S_plus + S_minus)/(4 pi) is the
action of the resonant torus.

The extraction pipeline:
 1. scan a vertical line for the energy-stddev jumps that mark the
    separatrix crossings, shrinking the window until both edges are
    bracketed, then bisect the edges;
 2. polish the island center with a Newton solve on the r-step map;
 3. finite-difference the monodromy around it;
 4. launch orbits just outside each separatrix edge and bin their
    envelopes toward the chain to get S_plus and S_minus.

All finite differencing runs the map with a fixed uniform step count
so that perturbed orbits share one discretization and truncation error
cancels in the differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classical import (
    DEFAULT_SECTION,
    DEFAULT_TOL,
    TWO_PI,
    PhasePoint,
    find_resonant_energy,
    rotational_z,
    scan_energy_stddev,
    strobe_energy_stddev,
    strobe_orbit,
    stroboscopic_map,
)
from .errors import (
    DegenerateIslandError,
    FixedPointError,
    IslandNotFoundError,
    MonodromyError,
    TracingError,
    UnstableOrbitError,
)
from .model import ModelParams


def _auto_flow_steps(tau: float) -> int:
    return max(256, int(round(64.0 * tau)))


def _wrap_pi(x: float) -> float:
    return (x + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class SeparatrixScan:
    """Bracketed separatrix edges on a vertical scan line."""

    phi_line: float
    z_grid: np.ndarray
    stddev: np.ndarray
    z_lower: float
    z_upper: float
    z_center: float
    n_shrinks: int


@dataclass(frozen=True)
class MonodromyResult:
    matrix: np.ndarray
    trace: float
    det: float
    fd_step: float
    flow_steps: int


@dataclass(frozen=True)
class IslandGeometry:
    s_plus: float
    s_minus: float
    coverage_upper: float
    coverage_lower: float
    delta: float
    bin_phi: np.ndarray
    upper_envelope: np.ndarray
    lower_envelope: np.ndarray


@dataclass(frozen=True)
class PendulumParams:
    """Effective-pendulum constants of one island chain.

    I_rs: action of the resonant torus, (S+ + S-)/(4 pi).
    m_rs: effective mass, half_area / rotation_rate.
    K_rs: drive strength, half_area * rotation_rate / 2.
    """

    I_rs: float
    m_rs: float
    K_rs: float
    r: int
    s: int
    tau: float
    epsilon: float

    @property
    def half_area(self) -> float:
        """(S+ - S-)/16, recovered as sqrt(2 m K)."""
        return math.sqrt(2.0 * self.m_rs * abs(self.K_rs))

    @property
    def rotation_rate(self) -> float:
        """Small-oscillation frequency about the chain center, sqrt(2 K / m)."""
        return math.sqrt(2.0 * abs(self.K_rs) / self.m_rs)


@dataclass(frozen=True)
class ExtractionResult:
    params: ModelParams
    resonant_energy: float
    scan: SeparatrixScan
    fixed_points: list[PhasePoint]
    monodromy: MonodromyResult
    geometry: IslandGeometry
    pendulum: PendulumParams


def scan_separatrix(
    params: ModelParams,
    resonant_energy: float,
    phi_line: float | None = None,
    half_width: float = 0.35,
    n_grid: int = 200,
    n_iter: int = 2000,
    shrink_factor: float = 4.0,
    max_shrinks: int = 6,
    jump_threshold: float = 5.0,
    min_interior: int = 8,
    z_tol: float = 1e-8,
    z_range: tuple[float, float] | None = None,
    section: str = DEFAULT_SECTION,
    tol: float = DEFAULT_TOL,
) -> SeparatrixScan:
    """Bracket the island chain crossing the vertical line phi_line.

    Seeds a z grid centered on the resonant torus and watches the
    stroboscopic energy stddev: the profile across a chain is M shaped,
    a hump at each separatrix crossing with a quiet core between them.
    Jump candidates are rises or falls exceeding jump_threshold times
    the median step; the chain is the dominant straddling pair extended
    outward through neighboring candidates, so inner hump edges are
    never mistaken for the chain boundary. The grid window shrinks
    geometrically toward the torus until at least min_interior grid
    points resolve the chain; each edge is then bisected to z_tol.
    Passing z_range pins the window instead of auto-shrinking. Raises
    IslandNotFoundError when no window resolves a clean pair of jumps.
    """
    if phi_line is None:
        phi_line = math.pi
    z_res = rotational_z(phi_line, resonant_energy, params)

    w = half_width
    n_windows = 1 if z_range is not None else max_shrinks + 1
    for shrink in range(n_windows):
        if z_range is not None:
            lo, hi = z_range
        else:
            lo = max(z_res - w, -1.0 + 1e-9)
            hi = min(z_res + w, 1.0 - 1e-9)
        z_grid = np.linspace(lo, hi, n_grid)
        sd = scan_energy_stddev(phi_line, z_grid, params, n_iter, section=section, tol=tol)

        edges = _bracket_chain(z_grid, sd, z_res, jump_threshold, min_interior)
        if edges is None:
            w /= shrink_factor
            continue
        i_lo, i_hi = edges

        def point_sd(z):
            return strobe_energy_stddev(
                PhasePoint(phi_line, z), params, n_iter, section=section, tol=tol
            )

        z_lower = _bisect_edge(
            z_grid[i_lo], z_grid[i_lo + 1], sd[i_lo], sd[i_lo + 1], point_sd, z_tol
        )
        z_upper = _bisect_edge(
            z_grid[i_hi], z_grid[i_hi + 1], sd[i_hi], sd[i_hi + 1], point_sd, z_tol
        )
        interior = sd[i_lo + 1 : i_hi + 1]
        z_center = float(z_grid[i_lo + 1 + int(np.argmin(interior))])
        if not z_lower < z_center < z_upper:
            z_center = 0.5 * (z_lower + z_upper)
        return SeparatrixScan(
            phi_line=phi_line,
            z_grid=z_grid,
            stddev=sd,
            z_lower=float(z_lower),
            z_upper=float(z_upper),
            z_center=z_center,
            n_shrinks=shrink,
        )
    raise IslandNotFoundError(
        f"no separatrix jump pair on phi={phi_line:.4f} after {n_windows} window sizes"
    )


def _bracket_chain(z_grid, sd, z_res, jump_threshold, min_interior):
    """Outer-edge intervals (i_lo, i_hi) of the island chain, or None.

    Seeds on the two largest separated jump candidates straddling the
    resonant torus, then widens each side through any candidate within
    one seed-width, which merges the inner and outer edges of each
    separatrix hump. Rejects brackets resolved by fewer than
    min_interior grid points or touching the window boundary.
    """
    diffs = np.abs(np.diff(sd))
    med = float(np.median(diffs))
    if med <= 0.0:
        med = float(np.finfo(float).tiny)
    cand = np.where(diffs > jump_threshold * med)[0]
    if cand.size < 2:
        return None
    order = cand[np.argsort(diffs[cand])[::-1]]
    i1 = int(order[0])
    i2 = -1
    for j in order[1:]:
        if abs(int(j) - i1) >= 2:
            lo, hi = min(i1, int(j)), max(i1, int(j))
            if z_grid[lo] <= z_res <= z_grid[hi + 1]:
                i2 = int(j)
                break
    if i2 < 0:
        return None
    i_lo, i_hi = min(i1, i2), max(i1, i2)
    # walk outward through comparably sharp jumps within one seed-width,
    # merging the inner and outer edges of each separatrix hump without
    # creeping along smooth background variation
    width = z_grid[i_hi + 1] - z_grid[i_lo]
    floor = 0.2 * min(diffs[i_lo], diffs[i_hi])
    strong = cand[diffs[cand] >= floor]
    grown = True
    while grown:
        grown = False
        for j in strong:
            if j < i_lo and z_grid[i_lo] - z_grid[j + 1] <= width:
                i_lo = int(j)
                grown = True
            elif j > i_hi and z_grid[j] - z_grid[i_hi + 1] <= width:
                i_hi = int(j)
                grown = True
    if i_hi - i_lo < min_interior:
        return None
    if i_lo == 0 or i_hi >= diffs.size - 1:
        return None
    # a genuine chain forms on the torus, so z_res sits well inside;
    # a bracket polluted by a neighboring chain is badly lopsided
    rel = (z_res - z_grid[i_lo]) / (z_grid[i_hi + 1] - z_grid[i_lo])
    if not 0.12 <= rel <= 0.88:
        return None
    return i_lo, i_hi


def _bisect_edge(z_a, z_b, sd_a, sd_b, point_sd, z_tol):
    """Bisect a stddev step inside [z_a, z_b] down to z_tol."""
    thr = 0.5 * (sd_a + sd_b)
    side_a = sd_a > thr
    lo, hi = z_a, z_b
    while hi - lo > z_tol:
        mid = 0.5 * (lo + hi)
        if (point_sd(mid) > thr) == side_a:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _pr_map(
    point: PhasePoint, params: ModelParams, r: int, section: str, flow_steps: int
) -> PhasePoint:
    return stroboscopic_map(point, params, n=r, section=section, fixed_steps=flow_steps)


def _pr_jacobian(point, params, r, section, flow_steps, fd_step):
    """Central-difference Jacobian of the r-step map."""
    jac = np.empty((2, 2))
    for col, (dp, dz) in enumerate(((fd_step, 0.0), (0.0, fd_step))):
        zp = min(point.z + dz, 1.0)
        zm = max(point.z - dz, -1.0)
        fp = _pr_map(PhasePoint(point.phi + dp, zp), params, r, section, flow_steps)
        fm = _pr_map(PhasePoint(point.phi - dp, zm), params, r, section, flow_steps)
        denom = 2.0 * fd_step if col == 0 else (zp - zm)
        jac[0, col] = _wrap_pi(fp.phi - fm.phi) / denom
        jac[1, col] = (fp.z - fm.z) / denom
    return jac


def locate_fixed_point(
    guess: PhasePoint,
    params: ModelParams,
    r: int,
    section: str = DEFAULT_SECTION,
    flow_steps: int | None = None,
    fd_step: float = 1e-7,
    residual_tol: float = 1e-11,
    max_iter: int = 50,
    max_step: float = 0.05,
) -> PhasePoint:
    """Newton-polish a fixed point of the r-step map.

    Solves P^r(x) = x with the angle residual wrapped to (-pi, pi] and
    steps clamped to max_step so a poor Jacobian far from the island
    cannot eject the iterate. Raises FixedPointError on stagnation.
    """
    if flow_steps is None:
        flow_steps = _auto_flow_steps(params.tau)
    phi, z = guess.phi, guess.z
    for _ in range(max_iter):
        here = PhasePoint(phi, z)
        image = _pr_map(here, params, r, section, flow_steps)
        g = np.array([_wrap_pi(image.phi - phi), image.z - z])
        if math.hypot(g[0], g[1]) <= residual_tol:
            return here
        jac = _pr_jacobian(here, params, r, section, flow_steps, fd_step)
        try:
            step = np.linalg.solve(jac - np.eye(2), -g)
        except np.linalg.LinAlgError as exc:
            raise FixedPointError(f"singular Newton system at ({phi}, {z})") from exc
        norm = math.hypot(step[0], step[1])
        if norm > max_step:
            step *= max_step / norm
        phi = (phi + step[0]) % TWO_PI
        z = float(np.clip(z + step[1], -1.0 + 1e-12, 1.0 - 1e-12))
    raise FixedPointError(
        f"no convergence after {max_iter} Newton steps; last residual {math.hypot(*g):.2e}"
    )


def monodromy_matrix(
    fixed_point: PhasePoint,
    params: ModelParams,
    r: int,
    section: str = DEFAULT_SECTION,
    flow_steps: int | None = None,
    fd_step: float = 1e-6,
    det_tol: float = 1e-6,
    consistency_tol: float = 1e-5,
) -> MonodromyResult:
    """Monodromy of the r-step map at an island center.

    Differences at fd_step and fd_step/2 must agree to consistency_tol
    (MonodromyError otherwise); the half-step version is returned. The
    map is symplectic, so |det - 1| > det_tol is also rejected, and an
    elliptic center must have |trace| < 2 (UnstableOrbitError).
    """
    if flow_steps is None:
        flow_steps = _auto_flow_steps(params.tau)
    m_full = _pr_jacobian(fixed_point, params, r, section, flow_steps, fd_step)
    m_half = _pr_jacobian(fixed_point, params, r, section, flow_steps, 0.5 * fd_step)
    gap = float(np.max(np.abs(m_full - m_half)))
    if gap > consistency_tol:
        raise MonodromyError(
            f"finite-difference monodromy not converged: step-halving gap {gap:.2e}"
        )
    det = float(np.linalg.det(m_half))
    if abs(det - 1.0) > det_tol:
        raise MonodromyError(f"monodromy determinant {det} violates area preservation")
    trace = float(np.trace(m_half))
    if abs(trace) >= 2.0:
        raise UnstableOrbitError(f"orbit is not elliptic: |trace| = {abs(trace)} >= 2")
    return MonodromyResult(
        matrix=m_half, trace=trace, det=det, fd_step=0.5 * fd_step, flow_steps=flow_steps
    )


def trace_separatrix_branches(
    scan: SeparatrixScan,
    params: ModelParams,
    n_iter: int = 4000,
    n_bins: int = 400,
    max_gap: float = 0.15,
    max_expand: int = 6,
    z_inner: float | None = None,
    section: str = DEFAULT_SECTION,
    tol: float = DEFAULT_TOL,
) -> IslandGeometry:
    """Areas under the outer and inner separatrix branches.

    Just outside the chain the orbit lies on a single-valued invariant
    curve z(phi), so the branch area comes from a trapezoid rule over
    the phi-sorted iterates. Whether a launch is outside is decided by
    the orbit itself: relative to the resonant hop of 2 pi s / r per
    step, a circulating orbit slips monotonically in angle, while a
    trapped one reverses every half libration cycle; a circulating
    orbit must also cover the angle without large gaps. Each branch
    bisects that oracle between the island core (z_inner, defaulting to
    the scanned center) and the scanned edge; the last circulating
    orbit, the closest coverable torus for the given n_iter, supplies
    the area. Scan-edge placement therefore only needs to be outside
    the chain, not accurate.
    """
    width = scan.z_upper - scan.z_lower
    hop = TWO_PI * params.s / params.r

    def probe(z0):
        z0 = float(np.clip(z0, -1.0 + 1e-12, 1.0 - 1e-12))
        phis, zs = strobe_orbit(
            PhasePoint(scan.phi_line, z0), params, n_iter, section=section, tol=tol
        )
        order = np.argsort(phis)
        p_s, z_s = phis[order], zs[order]
        gap = _max_angle_gap(p_s)
        good = gap <= max_gap and _winds_monotonically(phis, hop)
        return good, gap, (p_s, z_s)

    results = {}
    coverages = {}
    curves = {}
    delta_used = 0.0
    for name, z_edge, sign in (("upper", scan.z_upper, +1.0), ("lower", scan.z_lower, -1.0)):
        z_out = z_edge
        good, gap, curve = probe(z_out)
        expand = 0
        while not good and expand < max_expand:
            z_out += sign * 0.5 * width
            good, gap, curve = probe(z_out)
            expand += 1
        if not good:
            raise TracingError(
                f"{name} branch found no circulating orbit out to {z_out:.6f} "
                f"(angle gap {gap:.3f} rad)"
            )
        z_bad = scan.z_center if z_inner is None else z_inner
        z_tol_trace = max(1e-10, 1e-5 * width)
        while abs(z_out - z_bad) > z_tol_trace:
            mid = 0.5 * (z_out + z_bad)
            good_m, _, curve_m = probe(mid)
            if good_m:
                z_out, curve = mid, curve_m
            else:
                z_bad = mid
        p_s, z_s = curve
        # close the curve periodically before integrating
        p_c = np.concatenate([p_s[-1:] - TWO_PI, p_s, p_s[:1] + TWO_PI])
        z_c = np.concatenate([z_s[-1:], z_s, z_s[:1]])
        results[name] = float(np.trapezoid(z_c[1:] + 1.0, p_c[1:]))
        coverages[name] = 1.0 - _max_angle_gap(p_s) / TWO_PI
        curves[name] = (p_c, z_c)
        delta_used = max(delta_used, abs(z_out - z_bad))

    dphi = TWO_PI / n_bins
    bin_phi = (np.arange(n_bins) + 0.5) * dphi
    upper = np.interp(bin_phi, *curves["upper"])
    lower = np.interp(bin_phi, *curves["lower"])
    s_plus = results["upper"]
    s_minus = results["lower"]
    if not s_plus > s_minus:
        raise TracingError(
            f"branch areas out of order: S_plus={s_plus} <= S_minus={s_minus}"
        )
    return IslandGeometry(
        s_plus=s_plus,
        s_minus=s_minus,
        coverage_upper=coverages["upper"],
        coverage_lower=coverages["lower"],
        delta=delta_used,
        bin_phi=bin_phi,
        upper_envelope=upper,
        lower_envelope=lower,
    )


def _max_angle_gap(sorted_phis: np.ndarray) -> float:
    """Largest angular hole in a sorted sample of [0, 2 pi), wrap included."""
    if sorted_phis.size < 2:
        return TWO_PI
    inner = float(np.max(np.diff(sorted_phis)))
    wrap = float(sorted_phis[0] + TWO_PI - sorted_phis[-1])
    return max(inner, wrap)


def _winds_monotonically(phis: np.ndarray, hop: float, noise: float = 1e-12) -> bool:
    """Whether the per-step angular slip keeps one sign.

    phis is the orbit in time order; hop is the resonant angle advance
    per map step. Slips below the noise floor are ignored so a slow
    passage near the hyperbolic point does not flip the verdict.
    """
    slip = np.mod(np.diff(phis) - hop + math.pi, TWO_PI) - math.pi
    signed = slip[np.abs(slip) > noise]
    if signed.size == 0:
        return False
    n_pos = int(np.count_nonzero(signed > 0))
    return min(n_pos, signed.size - n_pos) <= max(2, signed.size // 1000)


def pendulum_params(
    geometry: IslandGeometry,
    monodromy: MonodromyResult,
    r: int,
    tau: float,
    s: int = 1,
    epsilon: float = math.nan,
) -> PendulumParams:
    """Pendulum strength, mass, and resonant action from the measured
    chain geometry and center stability."""
    a = (geometry.s_plus - geometry.s_minus) / 16.0
    if a <= 0.0:
        raise DegenerateIslandError(f"non-positive half-area a={a}")
    if abs(monodromy.trace) >= 2.0:
        raise UnstableOrbitError(f"trace {monodromy.trace} not elliptic")
    angle = math.acos(monodromy.trace / 2.0)
    if angle <= 0.0:
        raise DegenerateIslandError("zero rotation angle; chain degenerate to a torus")
    b = angle / (r * r * tau)
    return PendulumParams(
        I_rs=(geometry.s_plus + geometry.s_minus) / (4.0 * math.pi),
        m_rs=a / b,
        K_rs=0.5 * a * b,
        r=r,
        s=s,
        tau=tau,
        epsilon=epsilon,
    )


def pendulum_levels(pend: PendulumParams, hbar: float, n_levels: int) -> np.ndarray:
    """Kinetic pendulum energies of the quantized actions nearest the
    chain: e_n = (hbar (n + 1/2) - I)^2 / (2 m)."""
    n = np.arange(n_levels)
    return (hbar * (n + 0.5) - pend.I_rs) ** 2 / (2.0 * pend.m_rs)


def rat_splitting_scaled(pend: PendulumParams) -> float:
    """Resonance-assisted doublet splitting in scaled energy units."""
    return 2.0 * abs(pend.K_rs)


def harmonic_splitting_scaled(pend: PendulumParams, hbar: float) -> float:
    """Harmonic (saturated) doublet splitting in scaled energy units."""
    return hbar * pend.r * math.sqrt(2.0 * abs(pend.K_rs) / pend.m_rs)


def splitting_phase(scaled: float, j: float, tau: float) -> float:
    """Convert a scaled-energy splitting to a quasienergy phase gap."""
    return scaled * j * tau


def rat_splitting(pend: PendulumParams, j: float) -> float:
    """Resonance-assisted doublet splitting as a quasienergy phase gap."""
    return splitting_phase(rat_splitting_scaled(pend), j, pend.tau)


def harmonic_splitting(pend: PendulumParams) -> float:
    """Saturated doublet splitting as a quasienergy phase gap.

    The scaled form carries one power of hbar_eff, so the phase gap
    r tau sqrt(2 K / m) is independent of the spin size.
    """
    return pend.r * pend.tau * math.sqrt(2.0 * abs(pend.K_rs) / pend.m_rs)


def epsilon_max(
    amplitude: float, exponent: float, mass: float, r: int, hbar: float
) -> float:
    """Kick strength where the resonance-assisted splitting overtakes
    the harmonic one, from the fitted strength law K = A eps^p."""
    if amplitude <= 0 or mass <= 0:
        raise ValueError("amplitude and mass must be positive")
    return (r * r * hbar * hbar / (2.0 * amplitude * mass)) ** (1.0 / exponent)


def epsilon_max_crossing(
    epsilons: np.ndarray, strengths: np.ndarray, masses: np.ndarray, r: int, hbar: float
) -> float | None:
    """Crossing of the two splitting laws on a measured table, by
    log-linear interpolation; None when the table does not bracket it."""
    eps = np.asarray(epsilons, dtype=float)
    k = np.asarray(strengths, dtype=float)
    m = np.asarray(masses, dtype=float)
    order = np.argsort(eps)
    eps, k, m = eps[order], k[order], m[order]
    # sign of log(RAT) - log(harmonic) = 0.5 log(2 K m / (hbar r)^2)
    f = 0.5 * np.log(2.0 * k * m / (hbar * r) ** 2)
    sign_change = np.where(f[:-1] * f[1:] <= 0)[0]
    if sign_change.size == 0:
        return None
    i = int(sign_change[0])
    t = f[i] / (f[i] - f[i + 1])
    return float(np.exp(np.log(eps[i]) + t * (np.log(eps[i + 1]) - np.log(eps[i]))))


def extract_island(
    params: ModelParams,
    resonant_energy: float | None = None,
    phi_line: float | None = None,
    section: str = DEFAULT_SECTION,
    scan_kwargs: dict | None = None,
    trace_kwargs: dict | None = None,
    mono_kwargs: dict | None = None,
    flow_steps: int | None = None,
) -> ExtractionResult:
    """Full pipeline: scan, center polish, monodromy, branch areas,
    pendulum parameters. The resonance is taken from params (r, s): the
    targeted chain is the orbit closing after r map steps and s angle
    cycles, so its flow period is r tau / s.
    """
    r = params.r
    if resonant_energy is None:
        resonant_energy = find_resonant_energy(params.r * params.tau / params.s, params)
    scan = scan_separatrix(
        params, resonant_energy, phi_line=phi_line, section=section, **(scan_kwargs or {})
    )
    center = locate_fixed_point(
        PhasePoint(scan.phi_line, scan.z_center),
        params,
        r,
        section=section,
        flow_steps=flow_steps,
    )
    fixed_points = [center]
    for _ in range(r - 1):
        nxt = stroboscopic_map(fixed_points[-1], params, n=1, section=section)
        fixed_points.append(
            locate_fixed_point(nxt, params, r, section=section, flow_steps=flow_steps)
        )
    mono = monodromy_matrix(
        center, params, r, section=section, flow_steps=flow_steps, **(mono_kwargs or {})
    )
    tkw = dict(trace_kwargs or {})
    if "n_iter" not in tkw:
        # slow chains need proportionally more iterates to cover the angle
        rate = math.acos(np.clip(mono.trace / 2.0, -1.0, 1.0)) / r
        tkw["n_iter"] = int(min(100_000, max(4000, 60.0 / max(rate, 1e-9))))
    tkw.setdefault("z_inner", center.z)
    geometry = trace_separatrix_branches(scan, params, section=section, **tkw)
    pend = pendulum_params(geometry, mono, r, params.tau, s=params.s, epsilon=params.epsilon)
    return ExtractionResult(
        params=params,
        resonant_energy=resonant_energy,
        scan=scan,
        fixed_points=fixed_points,
        monodromy=mono,
        geometry=geometry,
        pendulum=pend,
    )
