"""Collective-spin model: operators, static spectrum, resonant pair selection.

The static Hamiltonian for a spin of size J is

    H0 = omega0 * Jz + gamma_x / (2J - 1) * Jx^2

in the |J, m> basis ordered m = -J ... J. Energies grow linearly with J,
so spectra are compared to classical mechanics through the scaled energy
E/J, and the effective Planck constant is hbar_eff = 1/J.

H0 couples m only to m and m +/- 2, so it commutes with the parity
operator P = diag((-1)^(m+J)) and splits into two real tridiagonal
blocks. The spectrum is built block by block, which keeps every
eigenvector exactly parity-pure in floating point and makes the
selection rule <E_{k+2}| Jx |E_k> = 0 exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import SpectrumError

TWO_PI = 2.0 * np.pi


def hbar_eff(j: float) -> float:
    """Effective Planck constant 1/J of the scaled classical limit."""
    return 1.0 / j


def _validate_spin(j: float) -> int:
    """Return the dimension 2J+1, rejecting non-half-integer or J <= 0."""
    two_j = 2.0 * j
    if two_j <= 0 or abs(two_j - round(two_j)) > 1e-12:
        raise ValueError(f"spin size must be a positive half-integer, got {j}")
    return int(round(two_j)) + 1


@dataclass(frozen=True)
class ModelParams:
    """Model parameters shared by the quantum and classical pipelines.

    Attributes
    ----------
    j : float
        Spin size J >= 1 (the H0 coupling divides by 2J - 1).
    omega0 : float
        Linear precession frequency.
    gamma_x : float
        Quadratic coupling strength. The default -0.95 puts the model in
        the trapping-free regime where every classical orbit is
        rotational in phi.
    tau : float
        Kick period.
    epsilon : float
        Kick angle about the x axis.
    r, s : int
        Resonance order: r kick periods match s classical orbits.
    """

    j: float
    omega0: float = 1.0
    gamma_x: float = -0.95
    tau: float = 8.0
    epsilon: float = 0.0
    r: int = 1
    s: int = 1

    def __post_init__(self):
        _validate_spin(self.j)
        if self.j < 1:
            raise ValueError(f"j must be >= 1 so that 2j - 1 > 0, got {self.j}")
        if not np.isfinite(self.omega0) or not np.isfinite(self.gamma_x):
            raise ValueError("omega0 and gamma_x must be finite")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.r < 1 or self.s < 1:
            raise ValueError(f"resonance orders must be >= 1, got r={self.r} s={self.s}")

    @property
    def dim(self) -> int:
        return int(round(2 * self.j)) + 1

    @property
    def hbar(self) -> float:
        return 1.0 / self.j


@dataclass(frozen=True)
class SpinOperators:
    """Dense spin-J matrices in the |J, m> basis, m ascending."""

    j: float
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def dim(self) -> int:
        return self.jx.shape[0]


def build_spin_matrices(j: float) -> SpinOperators:
    """Construct Jx, Jy, Jz for spin size j.

    Ladder elements follow <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)). Any
    positive half-integer j is accepted here; the J >= 1 restriction
    only applies to the model Hamiltonian.
    """
    dim = _validate_spin(j)
    m = np.arange(dim, dtype=float) - j
    up = np.sqrt(j * (j + 1.0) - m[:-1] * (m[:-1] + 1.0))
    jp = np.zeros((dim, dim))
    jp[np.arange(1, dim), np.arange(dim - 1)] = up  # <m+1|J+|m>
    jx = 0.5 * (jp + jp.T)
    jy = -0.5j * (jp - jp.T)
    jz = np.diag(m)
    return SpinOperators(j=j, jx=jx, jy=jy, jz=jz)


def build_h0(ops: SpinOperators, params: ModelParams) -> np.ndarray:
    if abs(ops.j - params.j) > 1e-12:
        raise ValueError("operator spin size does not match params.j")
    if abs(2 * params.j - 1) < 1e-12:
        raise ValueError("h0 undefined at j = 1/2 (divisor 2j - 1 vanishes)")
    return params.omega0 * ops.jz + params.gamma_x / (2 * params.j - 1) * (ops.jx @ ops.jx)


def parity_operator(j: float) -> np.ndarray:
    """Diagonal parity diag((-1)^(m+J)); +1 on the m = -J state."""
    dim = _validate_spin(j)
    return np.diag(np.where(np.arange(dim) % 2 == 0, 1.0, -1.0))


@dataclass(frozen=True)
class StaticSpectrum:
    """Eigenpairs of H0 with parity labels.

    energies are strictly ascending; states holds eigenvectors as
    columns in the |J, m> basis; parities holds +1/-1 per eigenstate.
    """

    energies: np.ndarray
    states: np.ndarray
    parities: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size


def build_static_spectrum(h0: np.ndarray, parity: np.ndarray) -> StaticSpectrum:
    """Diagonalize H0 exploiting its parity block structure.

    The parity pattern is read off the diagonal of ``parity``; H0 must
    commute with it. Eigenvectors are assembled with exact zeros in the
    opposite-parity sector and a sign gauge fixing the largest-magnitude
    component positive, so repeated builds are bit-identical.
    """
    h0 = np.asarray(h0, dtype=float)
    n = h0.shape[0]
    if h0.shape != (n, n) or parity.shape != (n, n):
        raise ValueError("h0 and parity must be square matrices of equal size")
    scale = max(np.abs(h0).max(), 1.0)
    if np.abs(h0 - h0.T).max() > 1e-12 * scale:
        raise ValueError("h0 must be symmetric")
    signs = np.sign(np.diag(parity))
    comm = h0 @ parity - parity @ h0
    if np.abs(comm).max() > 1e-10 * scale:
        raise SpectrumError("h0 does not commute with the parity operator")

    energies = np.empty(n)
    states = np.zeros((n, n))
    parities = np.empty(n, dtype=int)
    filled = 0
    for sign in (1.0, -1.0):
        idx = np.where(signs == sign)[0]
        if idx.size == 0:
            continue
        vals, vecs = eigh(h0[np.ix_(idx, idx)])
        sl = slice(filled, filled + idx.size)
        energies[sl] = vals
        block = np.zeros((n, idx.size))
        block[idx, :] = vecs
        states[:, sl] = block
        parities[sl] = int(sign)
        filled += idx.size

    order = np.argsort(energies, kind="stable")
    energies, states, parities = energies[order], states[:, order], parities[order]

    gaps = np.diff(energies)
    guard = 1e-12 * np.abs(energies).max()
    if gaps.size and gaps.min() < guard:
        k = int(np.argmin(gaps))
        raise SpectrumError(
            f"near-degenerate levels {k},{k + 1}: gap {gaps.min():.3e} below guard {guard:.3e}"
        )

    # deterministic sign gauge
    lead = np.argmax(np.abs(states), axis=0)
    flip = states[lead, np.arange(n)] < 0
    states[:, flip] *= -1.0
    return StaticSpectrum(energies=energies, states=states, parities=parities)


def compute_spectrum(params: ModelParams) -> StaticSpectrum:
    """Build operators and diagonalize H0 for the given parameters."""
    ops = build_spin_matrices(params.j)
    return build_static_spectrum(build_h0(ops, params), parity_operator(params.j))


def quantum_period(spectrum: StaticSpectrum, k: int, r: int) -> float:
    """Heisenberg-like pair period T_{k,r} = 2 pi / (E_{k+r} - E_k)."""
    n = spectrum.dim
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if not (0 <= k and k + r < n):
        raise ValueError(f"pair ({k}, {k + r}) out of range for {n} levels")
    return TWO_PI / (spectrum.energies[k + r] - spectrum.energies[k])


def select_resonant_index(spectrum: StaticSpectrum, t_resonant: float, r: int) -> int:
    """Index k_R of the level pair realizing the r:s resonance.

    Picks the k minimizing |T_{k,r} - t_resonant / r|, i.e. the pair
    whose degeneracy-calibrated kick period sits closest to the
    classical one. Ties resolve to the smaller k. This period-proximity
    rule, rather than raw closeness of E_k/J to the resonant energy, is
    what reproduces the reference pair periods to fractional 1e-9.
    """
    if t_resonant <= 0:
        raise ValueError(f"t_resonant must be positive, got {t_resonant}")
    n = spectrum.dim
    if n < r + 1:
        raise ValueError("spectrum too small for the requested resonance order")
    gaps = spectrum.energies[r:] - spectrum.energies[:-r]
    periods = TWO_PI / gaps
    return int(np.argmin(np.abs(periods - t_resonant / r)))


def calibrate_tau(spectrum: StaticSpectrum, k_r: int, r: int, s: int) -> float:
    """Kick period making the pair (k_R, k_R + r) exactly degenerate.

    tau_q = 2 pi s / (E_{k_R + r} - E_{k_R}), so tau_q * gap = 2 pi s
    and both quasienergies coincide mod 2 pi at epsilon = 0.
    """
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    return s * quantum_period(spectrum, k_r, r)


def select_index_by_energy(spectrum: StaticSpectrum, j: float, e_r: float) -> int:
    """Index of the level whose scaled energy E_k / J is nearest e_r.

    Secondary selection rule; near-degenerate scaled levels can make it
    disagree with the period-proximity rule by one index at large J.
    """
    return int(np.argmin(np.abs(spectrum.energies / j - e_r)))


@dataclass(frozen=True)
class ResonanceSpec:
    """Quantum-side description of one r:s resonance.

    E_R may be carried over from the classical locator or left as nan
    when the resonance was pinned by a target period alone.
    """

    r: int
    s: int
    E_R: float
    k_R: int
    tau_q: float


def resonance_spec(
    spectrum: StaticSpectrum,
    r: int,
    s: int,
    t_resonant: float,
    e_r: float = float("nan"),
) -> ResonanceSpec:
    """Select the resonant pair for a target orbit period and calibrate
    the kick period that makes it exactly degenerate."""
    k_r = select_resonant_index(spectrum, t_resonant, r)
    return ResonanceSpec(
        r=r, s=s, E_R=e_r, k_R=k_r, tau_q=calibrate_tau(spectrum, k_r, r, s)
    )


def coherent_state(j: float, phi: float, z: float) -> np.ndarray:
    """Spin coherent state centred at (phi, z), z = <Jz>/J exactly.

    Amplitudes in the |J, m> basis are
    c_m = sqrt(C(2J, J+m)) * cos(t/2)^(J-m) * sin(t/2)^(J+m) * exp(-i phi (J+m))
    with z = -cos(t); the poles z = -1, +1 give the extremal basis states.
    """
    dim = _validate_spin(j)
    if not -1.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [-1, 1], got {z}")
    theta = np.arccos(np.clip(-z, -1.0, 1.0))
    half_c, half_s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    k = np.arange(dim)  # k = J + m
    two_j = dim - 1
    # log-binomial for numerical stability at large J
    log_binom = (
        _log_factorial(two_j) - _log_factorial(k) - _log_factorial(two_j - k)
    )
    # guard 0 * (-inf) at the poles where one weight has zero exponent
    with np.errstate(divide="ignore", invalid="ignore"):
        log_c = np.log(half_c) if half_c > 0 else -np.inf
        log_s = np.log(half_s) if half_s > 0 else -np.inf
        t_c = np.where(two_j - k > 0, (two_j - k) * log_c, 0.0)
        t_s = np.where(k > 0, k * log_s, 0.0)
    log_amp = 0.5 * log_binom + t_c + t_s
    amp = np.exp(log_amp) * np.exp(-1j * phi * k)
    return amp / np.linalg.norm(amp)


def _log_factorial(k):
    from scipy.special import gammaln

    return gammaln(np.asarray(k, dtype=float) + 1.0)
