"""Classical limit of the kicked spin: flow, kick, stroboscopic map.

Phase space is the unit sphere in canonical coordinates (phi, z) with
z = <Jz>/J in [-1, 1] and phi in [0, 2 pi). The scaled Hamiltonian

    H0(phi, z) = omega0 * z + 0.5 * (1 - z^2) * gamma_x * cos(phi)^2

generates the between-kick flow; the kick is a rigid rotation of the
sphere by epsilon about the x axis, with the sign fixed so that
expectation values of a coherent state rotated by exp(-i eps Jx) follow
the same map. For the defaults (omega0 = 1, gamma_x = -0.95) the flow
has no interior fixed points: every energy in (-1, 1) belongs to a
single rotational orbit, and the orbit period decreases monotonically
with energy, so resonant energies are unique.

The stroboscopic section is placed at the middle of the kick: one map
step applies half the kick, the full flow over tau, then the other half
kick. This symmetric section keeps the reflection symmetry of H0 about
phi = pi, pinning island centers to the symmetry line exactly instead
of offsetting them by O(epsilon) as a one-sided section does. A
post-kick section is retained as an option; the two are conjugate, so
island areas and monodromy traces agree.

Between-kick integration uses an embedded Runge-Kutta 7(8) pair with
adaptive steps at local tolerance 1e-12 (energy drift contract 1e-10).
Finite-difference Jacobians instead use a fixed uniform step count so
that perturbed evaluations share the exact same discretization and
their correlated truncation errors cancel in the differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit, prange
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import EnergyRangeError, IntegrationAccuracyError
from .model import ModelParams

TWO_PI = 2.0 * math.pi

DEFAULT_TOL = 1e-12
DEFAULT_DRIFT_TOL = 1e-10
DEFAULT_SECTION = "half_kick"
_SECTIONS = ("half_kick", "post_kick")

# Fehlberg 7(8) tableau; the 8th-order solution is propagated and the
# error estimate is h * 41/840 * (k1 + k11 - k12 - k13).
_A = np.zeros((13, 13))
_A[1, 0] = 2 / 27
_A[2, 0], _A[2, 1] = 1 / 36, 1 / 12
_A[3, 0], _A[3, 2] = 1 / 24, 1 / 8
_A[4, 0], _A[4, 2], _A[4, 3] = 5 / 12, -25 / 16, 25 / 16
_A[5, 0], _A[5, 3], _A[5, 4] = 1 / 20, 1 / 4, 1 / 5
_A[6, 0], _A[6, 3], _A[6, 4], _A[6, 5] = -25 / 108, 125 / 108, -65 / 27, 125 / 54
_A[7, 0], _A[7, 4], _A[7, 5], _A[7, 6] = 31 / 300, 61 / 225, -2 / 9, 13 / 900
_A[8, 0], _A[8, 3], _A[8, 4], _A[8, 5] = 2.0, -53 / 6, 704 / 45, -107 / 9
_A[8, 6], _A[8, 7] = 67 / 90, 3.0
_A[9, 0], _A[9, 3], _A[9, 4], _A[9, 5] = -91 / 108, 23 / 108, -976 / 135, 311 / 54
_A[9, 6], _A[9, 7], _A[9, 8] = -19 / 60, 17 / 6, -1 / 12
_A[10, 0], _A[10, 3], _A[10, 4], _A[10, 5] = 2383 / 4100, -341 / 164, 4496 / 1025, -301 / 82
_A[10, 6], _A[10, 7], _A[10, 8], _A[10, 9] = 2133 / 4100, 45 / 82, 45 / 164, 18 / 41
_A[11, 0], _A[11, 5], _A[11, 6] = 3 / 205, -6 / 41, -3 / 205
_A[11, 7], _A[11, 8], _A[11, 9] = -3 / 41, 3 / 41, 6 / 41
_A[12, 0], _A[12, 3], _A[12, 4], _A[12, 5] = -1777 / 4100, -341 / 164, 4496 / 1025, -289 / 82
_A[12, 6], _A[12, 7], _A[12, 8], _A[12, 9] = 2193 / 4100, 51 / 82, 33 / 164, 12 / 41
_A[12, 11] = 1.0
_B8 = np.zeros(13)
_B8[5], _B8[6], _B8[7] = 34 / 105, 9 / 35, 9 / 35
_B8[8], _B8[9] = 9 / 280, 9 / 280
_B8[11], _B8[12] = 41 / 840, 41 / 840
_ERRW = 41 / 840


@njit(cache=True, inline="always")
def _rhs(phi, z, w0, gx):
    c = math.cos(phi)
    dphi = w0 - z * gx * c * c
    dz = (1.0 - z * z) * gx * math.sin(phi) * c
    return dphi, dz


@njit(cache=True, inline="always")
def _energy(phi, z, w0, gx):
    c = math.cos(phi)
    return w0 * z + 0.5 * (1.0 - z * z) * gx * c * c


@njit(cache=True)
def _rk_stages(phi, z, h, w0, gx, kp, kz):
    for i in range(13):
        pp = phi
        zz = z
        for m in range(i):
            a = _A[i, m]
            if a != 0.0:
                pp += h * a * kp[m]
                zz += h * a * kz[m]
        dp, dz = _rhs(pp, zz, w0, gx)
        kp[i] = dp
        kz[i] = dz
    np_ = phi
    nz = z
    for i in range(13):
        b = _B8[i]
        if b != 0.0:
            np_ += h * b * kp[i]
            nz += h * b * kz[i]
    ep = h * _ERRW * (kp[0] + kp[10] - kp[11] - kp[12])
    ez = h * _ERRW * (kz[0] + kz[10] - kz[11] - kz[12])
    return np_, nz, ep, ez


@njit(cache=True)
def _flow(phi, z, t_total, w0, gx, tol, kp, kz):
    """Adaptive flow over t_total. Returns (phi, z, ok)."""
    if t_total == 0.0:
        return phi, z, True
    t = 0.0
    h = 0.1 if t_total > 0.1 else t_total
    h_min = t_total * 1e-14
    while t < t_total:
        if h > t_total - t:
            h = t_total - t
        np_, nz, ep, ez = _rk_stages(phi, z, h, w0, gx, kp, kz)
        sp = tol * (1.0 + abs(phi))
        sz = tol * (1.0 + abs(z))
        en = math.sqrt(0.5 * ((ep / sp) ** 2 + (ez / sz) ** 2))
        if en <= 1.0:
            t += h
            phi = np_
            z = nz
        fac = 5.0 if en == 0.0 else 0.9 * en ** (-0.125)
        if fac > 5.0:
            fac = 5.0
        elif fac < 0.2:
            fac = 0.2
        h *= fac
        if h < h_min:
            return phi, z, False
    return phi, z, True


@njit(cache=True)
def _flow_fixed(phi, z, t_total, n_steps, w0, gx, kp, kz):
    """Fixed uniform steps; identical discretization for nearby starts."""
    h = t_total / n_steps
    for _ in range(n_steps):
        phi, z, _, _ = _rk_stages(phi, z, h, w0, gx, kp, kz)
    return phi, z


@njit(cache=True, inline="always")
def _kick(phi, z, eps):
    if eps == 0.0:
        return phi, z
    s2 = 1.0 - z * z
    s = math.sqrt(s2) if s2 > 0.0 else 0.0
    jx = s * math.cos(phi)
    jy = s * math.sin(phi)
    ce = math.cos(eps)
    se = math.sin(eps)
    jy2 = jy * ce - z * se
    z2 = z * ce + jy * se
    if z2 > 1.0:
        z2 = 1.0
    elif z2 < -1.0:
        z2 = -1.0
    phi2 = math.atan2(jy2, jx)
    if phi2 < 0.0:
        phi2 += TWO_PI
    return phi2, z2


@njit(cache=True)
def _strobe(phi, z, tau, eps, w0, gx, tol, half, kp, kz):
    if half:
        phi, z = _kick(phi, z, 0.5 * eps)
        phi, z, ok = _flow(phi, z, tau, w0, gx, tol, kp, kz)
        phi, z = _kick(phi, z, 0.5 * eps)
    else:
        phi, z, ok = _flow(phi, z, tau, w0, gx, tol, kp, kz)
        phi, z = _kick(phi, z, eps)
    if phi >= TWO_PI:
        phi -= TWO_PI
    elif phi < 0.0:
        phi += TWO_PI
    return phi, z, ok


@njit(cache=True)
def _strobe_fixed(phi, z, tau, eps, n_steps, w0, gx, half, kp, kz):
    if half:
        phi, z = _kick(phi, z, 0.5 * eps)
        phi, z = _flow_fixed(phi, z, tau, n_steps, w0, gx, kp, kz)
        phi, z = _kick(phi, z, 0.5 * eps)
    else:
        phi, z = _flow_fixed(phi, z, tau, n_steps, w0, gx, kp, kz)
        phi, z = _kick(phi, z, eps)
    if phi >= TWO_PI:
        phi -= TWO_PI
    elif phi < 0.0:
        phi += TWO_PI
    return phi, z


@njit(cache=True)
def _strobe_orbit(phi, z, tau, eps, n_iter, w0, gx, tol, half):
    kp = np.empty(13)
    kz = np.empty(13)
    phis = np.empty(n_iter + 1)
    zs = np.empty(n_iter + 1)
    phis[0] = phi
    zs[0] = z
    ok_all = True
    for i in range(n_iter):
        phi, z, ok = _strobe(phi, z, tau, eps, w0, gx, tol, half, kp, kz)
        if not ok:
            ok_all = False
        phis[i + 1] = phi
        zs[i + 1] = z
    return phis, zs, ok_all


@njit(cache=True)
def _strobe_stddev(phi, z, tau, eps, n_iter, w0, gx, tol, half, kp, kz):
    """Std dev of H0 over the stroboscopic samples (seed included).

    Accumulates relative to the seed energy: the fluctuations are
    O(epsilon) on top of an O(1) mean, and the direct sum of squares
    would lose them to cancellation.
    """
    e0 = _energy(phi, z, w0, gx)
    s1 = 0.0
    s2 = 0.0
    for _ in range(n_iter):
        phi, z, ok = _strobe(phi, z, tau, eps, w0, gx, tol, half, kp, kz)
        if not ok:
            return -1.0
        e = _energy(phi, z, w0, gx) - e0
        s1 += e
        s2 += e * e
    n = n_iter + 1.0
    mean = s1 / n
    var = s2 / n - mean * mean
    return math.sqrt(var) if var > 0.0 else 0.0


@njit(cache=True, parallel=True)
def _scan_stddev(phi_line, z_grid, tau, eps, n_iter, w0, gx, tol, half):
    out = np.empty(z_grid.size)
    for i in prange(z_grid.size):
        kp = np.empty(13)
        kz = np.empty(13)
        out[i] = _strobe_stddev(phi_line, z_grid[i], tau, eps, n_iter, w0, gx, tol, half, kp, kz)
    return out


@njit(cache=True)
def _flow_trajectory(phi, z, t_total, w0, gx, tol, max_nodes):
    """Adaptive flow recording accepted nodes. Returns (t, phi, z, n, ok)."""
    ts = np.empty(max_nodes)
    ps = np.empty(max_nodes)
    zs = np.empty(max_nodes)
    ts[0] = 0.0
    ps[0] = phi
    zs[0] = z
    n = 1
    kp = np.empty(13)
    kz = np.empty(13)
    t = 0.0
    h = 0.1 if t_total > 0.1 else t_total
    h_min = t_total * 1e-14
    while t < t_total:
        if h > t_total - t:
            h = t_total - t
        np_, nz, ep, ez = _rk_stages(phi, z, h, w0, gx, kp, kz)
        sp = tol * (1.0 + abs(phi))
        sz = tol * (1.0 + abs(z))
        en = math.sqrt(0.5 * ((ep / sp) ** 2 + (ez / sz) ** 2))
        if en <= 1.0:
            t += h
            phi = np_
            z = nz
            if n < max_nodes:
                ts[n] = t
                ps[n] = phi
                zs[n] = z
                n += 1
            else:
                return ts, ps, zs, n, False
        fac = 5.0 if en == 0.0 else 0.9 * en ** (-0.125)
        if fac > 5.0:
            fac = 5.0
        elif fac < 0.2:
            fac = 0.2
        h *= fac
        if h < h_min:
            return ts, ps, zs, n, False
    return ts, ps, zs, n, True


# ---------------------------------------------------------------------------
# public wrappers


@dataclass(frozen=True)
class PhasePoint:
    phi: float
    z: float

    def __post_init__(self):
        if not -1.0 <= self.z <= 1.0:
            raise ValueError(f"z must lie in [-1, 1], got {self.z}")

    @property
    def at_pole(self) -> bool:
        return abs(self.z) == 1.0


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    phi: np.ndarray
    z: np.ndarray
    energy_drift: float


def classical_energy(phi, z, params: ModelParams):
    """Scaled energy H0(phi, z); accepts scalars or arrays."""
    c = np.cos(phi)
    return params.omega0 * np.asarray(z) + 0.5 * (1.0 - np.asarray(z) ** 2) * params.gamma_x * c * c


def energy_stddev(phi, z, params: ModelParams) -> float:
    """Standard deviation of the scaled energy over sampled points.

    Zero (to integration accuracy) on an invariant torus of the kicked
    map; jumps by orders of magnitude once samples straddle a
    separatrix or wander chaotically.
    """
    e = np.asarray(classical_energy(phi, z, params), dtype=float)
    return float(np.std(e))


def hamilton_rhs(phi: float, z: float, params: ModelParams) -> tuple[float, float]:
    """(dphi/dt, dz/dt) of the between-kick flow."""
    return _rhs(phi, z, params.omega0, params.gamma_x)


def integrate_flow(
    point: PhasePoint,
    duration: float,
    params: ModelParams,
    tol: float = DEFAULT_TOL,
    drift_tol: float = DEFAULT_DRIFT_TOL,
    max_nodes: int = 200_000,
) -> Trajectory:
    """Integrate the kick-free flow, checking energy conservation.

    Raises IntegrationAccuracyError when the recorded energy drift
    exceeds drift_tol, which is the accuracy contract every downstream
    scan relies on.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    ts, ps, zs, n, ok = _flow_trajectory(
        point.phi, point.z, duration, params.omega0, params.gamma_x, tol, max_nodes
    )
    if not ok:
        raise IntegrationAccuracyError("adaptive flow ran out of steps or nodes")
    ts, ps, zs = ts[:n].copy(), ps[:n].copy(), zs[:n].copy()
    e = classical_energy(ps, zs, params)
    drift = float(np.abs(e - e[0]).max())
    if drift > drift_tol:
        raise IntegrationAccuracyError(f"energy drift {drift:.3e} exceeds {drift_tol:.1e}")
    return Trajectory(times=ts, phi=ps, z=zs, energy_drift=drift)


def apply_kick(point: PhasePoint, epsilon: float) -> PhasePoint:
    """Rotate the sphere by epsilon about the x axis.

    Matches the Heisenberg rotation of spin expectations under
    exp(-i epsilon Jx): jy' = jy cos(eps) - jz sin(eps),
    jz' = jz cos(eps) + jy sin(eps). A point mapped to a pole gets
    phi = 0 by convention.
    """
    phi, z = _kick(point.phi, point.z, epsilon)
    return PhasePoint(phi=phi, z=z)


def _section_flag(section: str) -> bool:
    if section not in _SECTIONS:
        raise ValueError(f"section must be one of {_SECTIONS}, got {section!r}")
    return section == "half_kick"


def stroboscopic_map(
    point: PhasePoint,
    params: ModelParams,
    n: int = 1,
    section: str = DEFAULT_SECTION,
    tol: float = DEFAULT_TOL,
    fixed_steps: int | None = None,
) -> PhasePoint:
    """Apply n steps of the kicked map at the chosen section.

    With fixed_steps set, the flow inside each step uses that many
    uniform RK stages instead of adaptive control; use this for finite
    differencing so perturbed orbits share one discretization.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    half = _section_flag(section)
    kp, kz = np.empty(13), np.empty(13)
    phi, z = point.phi, point.z
    for _ in range(n):
        if fixed_steps is None:
            phi, z, ok = _strobe(
                phi, z, params.tau, params.epsilon, params.omega0, params.gamma_x, tol, half, kp, kz
            )
            if not ok:
                raise IntegrationAccuracyError("adaptive flow failed inside map step")
        else:
            phi, z = _strobe_fixed(
                phi, z, params.tau, params.epsilon, fixed_steps,
                params.omega0, params.gamma_x, half, kp, kz,
            )
    return PhasePoint(phi=phi, z=z)


def strobe_orbit(
    point: PhasePoint,
    params: ModelParams,
    n_iter: int,
    section: str = DEFAULT_SECTION,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Record n_iter map iterates (seed included as row 0)."""
    half = _section_flag(section)
    phis, zs, ok = _strobe_orbit(
        point.phi, point.z, params.tau, params.epsilon,
        n_iter, params.omega0, params.gamma_x, tol, half,
    )
    if not ok:
        raise IntegrationAccuracyError("adaptive flow failed during orbit")
    return phis, zs


def strobe_energy_stddev(
    point: PhasePoint,
    params: ModelParams,
    n_iter: int,
    section: str = DEFAULT_SECTION,
    tol: float = DEFAULT_TOL,
) -> float:
    """Energy standard deviation along one stroboscopic orbit."""
    half = _section_flag(section)
    kp, kz = np.empty(13), np.empty(13)
    val = _strobe_stddev(
        point.phi, point.z, params.tau, params.epsilon,
        n_iter, params.omega0, params.gamma_x, tol, half, kp, kz,
    )
    if val < 0.0:
        raise IntegrationAccuracyError("adaptive flow failed during stddev orbit")
    return float(val)


def scan_energy_stddev(
    phi_line: float,
    z_grid: np.ndarray,
    params: ModelParams,
    n_iter: int,
    section: str = DEFAULT_SECTION,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Vectorized strobe_energy_stddev along a vertical scan line."""
    half = _section_flag(section)
    out = _scan_stddev(
        phi_line, np.ascontiguousarray(z_grid, dtype=float),
        params.tau, params.epsilon, n_iter, params.omega0, params.gamma_x, tol, half,
    )
    if np.any(out < 0.0):
        raise IntegrationAccuracyError("adaptive flow failed during scan")
    return out


def poincare_section(
    seeds: list[PhasePoint],
    params: ModelParams,
    n_iter: int,
    section: str = DEFAULT_SECTION,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Stroboscopic orbits of several seeds.

    Returns an array with rows (seed_id, iter, phi, z), seeds included
    at iter 0, ordered by seed then iterate.
    """
    rows = np.empty((len(seeds) * (n_iter + 1), 4))
    for sid, seed in enumerate(seeds):
        phis, zs = strobe_orbit(seed, params, n_iter, section=section, tol=tol)
        sl = slice(sid * (n_iter + 1), (sid + 1) * (n_iter + 1))
        rows[sl, 0] = sid
        rows[sl, 1] = np.arange(n_iter + 1)
        rows[sl, 2] = phis
        rows[sl, 3] = zs
    return rows


# ---------------------------------------------------------------------------
# orbit geometry of the unkicked flow


def _energy_bounds(params: ModelParams, n: int = 241) -> tuple[float, float]:
    phi = np.linspace(0.0, TWO_PI, n)
    z = np.linspace(-1.0, 1.0, n)
    h = classical_energy(phi[None, :], z[:, None], params)
    return float(h.min()), float(h.max())


def classical_period(energy: float, params: ModelParams, quad_tol: float = 1e-10) -> float:
    """Period of the rotational orbit at the given scaled energy.

    T(E) = integral over phi of dphi / sqrt(omega0^2 - 2 E G + G^2)
    with G(phi) = gamma_x cos(phi)^2; the radicand is |dphi/dt| on the
    orbit, so the integral is the return time of one phi cycle.
    """
    w0, gx = params.omega0, params.gamma_x

    def radicand(phi):
        g = gx * math.cos(phi) ** 2
        return w0 * w0 - 2.0 * energy * g + g * g

    probe = np.linspace(0.0, TWO_PI, 721)
    rmin = min(radicand(p) for p in probe)
    if rmin <= 0.0:
        raise EnergyRangeError(
            f"energy {energy} leaves the rotational-orbit family (radicand min {rmin:.3e})"
        )
    lo, hi = _energy_bounds(params)
    if not lo <= energy <= hi:
        raise EnergyRangeError(f"energy {energy} outside attainable range [{lo:.4f}, {hi:.4f}]")
    val, _ = quad(
        lambda p: 1.0 / math.sqrt(radicand(p)),
        0.0,
        TWO_PI,
        epsabs=quad_tol,
        epsrel=quad_tol,
        limit=200,
    )
    return float(val)


def find_resonant_energy(
    t_target: float, params: ModelParams, xtol: float = 1e-8
) -> float:
    """Energy whose orbit period equals t_target (bracketed root solve)."""
    if t_target <= 0:
        raise ValueError("t_target must be positive")
    lo, hi = _energy_bounds(params)
    margin = 1e-6 * (hi - lo)
    if hi - lo < 1e-12:
        raise EnergyRangeError("energy range degenerate; no rotational family")
    grid = np.linspace(lo + margin, hi - margin, 64)
    periods = np.array([classical_period(e, params) for e in grid])
    if periods.max() - periods.min() < 1e-12:
        raise EnergyRangeError("orbit period is constant; resonance condition has no root")
    f = periods - t_target
    sign_change = np.where(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)[0]
    if sign_change.size == 0:
        raise EnergyRangeError(
            f"no orbit with period {t_target}; range [{periods.min():.4f}, {periods.max():.4f}]"
        )
    i = int(sign_change[0])
    root = brentq(
        lambda e: classical_period(e, params) - t_target, grid[i], grid[i + 1], xtol=xtol
    )
    return float(root)


@dataclass(frozen=True)
class ClassicalResonance:
    """A kick period commensurate with an orbit period: r tau = s T_R."""

    r: int
    s: int
    E_R: float
    T_R: float


def classical_resonance(
    r: int, s: int, tau: float, params: ModelParams, xtol: float = 1e-8
) -> ClassicalResonance:
    """Locate the rotational torus in r:s resonance with the kick period.

    The orbit must close after r map steps while circulating s times,
    so its flow period is r tau / s.
    """
    if r < 1 or s < 1:
        raise ValueError("resonance orders must be positive integers")
    t_r = r * tau / s
    e_r = find_resonant_energy(t_r, params, xtol=xtol)
    return ClassicalResonance(r=r, s=s, E_R=e_r, T_R=t_r)


def rotational_z(phi: float, energy: float, params: ModelParams) -> float:
    """z on the rotational orbit of the given energy at angle phi.

    The energy equation is quadratic in z; the branch continuous through
    z = E/omega0 at cos(phi) = 0 with |z| <= 1 is the rotational one.
    """
    w0, gx = params.omega0, params.gamma_x
    g = gx * math.cos(phi) ** 2
    if abs(g) < 1e-14:
        z = energy / w0
        if abs(z) > 1.0 + 1e-12:
            raise EnergyRangeError(f"no orbit point at phi={phi}, energy={energy}")
        return float(np.clip(z, -1.0, 1.0))
    rad = w0 * w0 - 2.0 * energy * g + g * g
    if rad < 0.0:
        raise EnergyRangeError(f"no orbit point at phi={phi}, energy={energy}")
    z = (w0 - math.sqrt(rad)) / g
    if abs(z) > 1.0 + 1e-9:
        raise EnergyRangeError(f"rotational branch outside sphere at phi={phi}: z={z}")
    return float(np.clip(z, -1.0, 1.0))


def warm_up() -> None:
    """Trigger JIT compilation of the hot kernels on tiny workloads."""
    p = ModelParams(j=2.0, tau=0.5, epsilon=0.01)
    pt = PhasePoint(phi=3.0, z=-0.3)
    stroboscopic_map(pt, p)
    stroboscopic_map(pt, p, fixed_steps=8)
    strobe_orbit(pt, p, 2)
    strobe_energy_stddev(pt, p, 2)
    scan_energy_stddev(3.0, np.array([-0.3, -0.2]), p, 2)
    integrate_flow(pt, 0.5, p)
