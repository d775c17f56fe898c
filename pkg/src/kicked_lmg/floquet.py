"""One-period propagator of the kicked spin and its resonant eigenpair.

The kick-period propagator is F = exp(-i tau H0) exp(-i epsilon Jx).
Both factors come from spectral decompositions of real symmetric
matrices, never from a series expansion, so F is unitary to rounding.
Quasienergies are eigenphases folded to [0, 2 pi); the resonant doublet
is followed through the spectrum by projecting Floquet states onto a
two-dimensional reference subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, schur

from .errors import TrackingLostError, UnitarityError
from .model import SpinOperators, StaticSpectrum

TWO_PI = 2.0 * np.pi

DEFAULT_OVERLAP_FLOOR = 0.5


class FloquetBuilder:
    """Caches the two eigenbases needed to assemble F(tau, epsilon).

    Args:
        spectrum: static spectrum of H0 (supplies one factor).
        ops: spin operators; only the tridiagonal jx is used.
    """

    def __init__(self, spectrum: StaticSpectrum, ops: SpinOperators):
        if ops.dim != spectrum.dim:
            raise ValueError("operator dimension does not match spectrum")
        self.spectrum = spectrum
        d = np.zeros(ops.dim)
        e = np.diag(ops.jx, k=1).copy()
        self._jx_vals, self._jx_vecs = eigh_tridiagonal(d, e)

    def matrix(self, tau: float, epsilon: float) -> np.ndarray:
        """Assemble F = exp(-i tau H0) exp(-i epsilon Jx)."""
        v, en = self.spectrum.states, self.spectrum.energies
        w, x = self._jx_vecs, self._jx_vals
        flow = (v * np.exp(-1j * tau * en)) @ v.T
        kick = (w * np.exp(-1j * epsilon * x)) @ w.T
        return flow @ kick


@dataclass(frozen=True)
class QuasiSpectrum:
    """Eigenphases in [0, 2 pi), ascending, with orthonormal states."""

    phases: np.ndarray
    states: np.ndarray

    @property
    def dim(self) -> int:
        return self.phases.size


def diagonalize_floquet(u: np.ndarray, unitarity_tol: float = 1e-8) -> QuasiSpectrum:
    """Diagonalize a unitary propagator.

    Uses the complex Schur form: for a normal matrix it is diagonal, and
    the transform columns give an orthonormal eigenbasis directly,
    avoiding the non-orthogonal vectors a general eigensolver can return
    inside near-degenerate clusters.

    Raises:
        UnitarityError: if u deviates from unitarity beyond tolerance.
    """
    u = np.asarray(u)
    n = u.shape[0]
    defect = np.abs(u.conj().T @ u - np.eye(n)).max()
    if defect > unitarity_tol:
        raise UnitarityError(f"propagator unitarity defect {defect:.3e} > {unitarity_tol:.1e}")
    t, q = schur(u, output="complex")
    lam = np.diag(t)
    phases = np.mod(-np.angle(lam), TWO_PI)
    order = np.argsort(phases, kind="stable")
    return QuasiSpectrum(phases=phases[order], states=q[:, order])


def circular_distance(a: float, b: float) -> float:
    """Distance between two phases on the circle, in [0, pi]."""
    d = np.mod(a - b, TWO_PI)
    return float(min(d, TWO_PI - d))


@dataclass(frozen=True)
class ResonantPair:
    """Two Floquet states identified with the resonant doublet."""

    index_a: int
    index_b: int
    overlap_a: float
    overlap_b: float
    delta_phi: float


def identify_resonant_pair(
    quasi: QuasiSpectrum,
    target: np.ndarray,
    overlap_floor: float = DEFAULT_OVERLAP_FLOOR,
) -> ResonantPair:
    """Select the two Floquet states with most weight in a 2d subspace.

    The weight of Floquet state |f> is |P|f>|^2 for the projector P onto
    span(target columns); it is basis independent inside that span, so
    degenerate reference pairs pose no ambiguity.

    Args:
        quasi: diagonalized propagator.
        target: (dim, 2) matrix whose columns span the reference subspace.
        overlap_floor: minimum acceptable weight of the weaker partner.

    Raises:
        TrackingLostError: if the second-best weight drops below the floor.
    """
    target = np.asarray(target)
    if target.shape != (quasi.dim, 2):
        raise ValueError(f"target must have shape ({quasi.dim}, 2)")
    # orthonormalize defensively; reference columns are orthonormal already
    qbasis, _ = np.linalg.qr(target)
    weights = (np.abs(qbasis.conj().T @ quasi.states) ** 2).sum(axis=0)
    ib, ia = np.argsort(weights)[-2:]
    if weights[ib] < overlap_floor:
        raise TrackingLostError(
            f"pair weight {weights[ib]:.3f} below floor {overlap_floor}; "
            "resonant doublet no longer separable from the background"
        )
    return ResonantPair(
        index_a=int(ia),
        index_b=int(ib),
        overlap_a=float(weights[ia]),
        overlap_b=float(weights[ib]),
        delta_phi=circular_distance(quasi.phases[ia], quasi.phases[ib]),
    )


def scaled_splitting(delta_phi: float, j: float, tau: float) -> float:
    """Quasienergy splitting in scaled-energy units, hbar_eff*dphi/tau."""
    return delta_phi / (j * tau)


def build_floquet(
    spectrum: StaticSpectrum, ops: SpinOperators, tau: float, epsilon: float
) -> np.ndarray:
    """One-shot propagator matrix; reuse a FloquetBuilder for sweeps."""
    return FloquetBuilder(spectrum, ops).matrix(tau, epsilon)


def quasienergy_splitting(
    quasi: QuasiSpectrum,
    target: np.ndarray,
    overlap_floor: float = DEFAULT_OVERLAP_FLOOR,
) -> float:
    """Phase gap of the doublet carrying the reference subspace."""
    return identify_resonant_pair(quasi, target, overlap_floor).delta_phi


@dataclass(frozen=True)
class PairSample:
    epsilon: float
    delta_phi: float
    overlap_a: float
    overlap_b: float


def pair_sweep(
    builder: FloquetBuilder,
    k_r: int,
    r: int,
    tau: float,
    eps_grid: np.ndarray,
    mode: str = "subspace",
    overlap_floor: float = DEFAULT_OVERLAP_FLOOR,
) -> list[PairSample]:
    """Track the resonant doublet across a kick-strength grid.

    mode 'subspace' projects every point onto the bare pair
    (|E_kR>, |E_kR+r>); mode 'continuation' projects onto the pair found
    at the previous grid point, which rides through avoided crossings
    where the bare projection degrades.
    """
    if mode not in ("subspace", "continuation"):
        raise ValueError(f"unknown tracking mode {mode!r}")
    ref = builder.spectrum.states[:, [k_r, k_r + r]].astype(complex)
    target = ref
    out: list[PairSample] = []
    for eps in np.asarray(eps_grid, dtype=float):
        quasi = diagonalize_floquet(builder.matrix(tau, eps))
        pair = identify_resonant_pair(quasi, target, overlap_floor)
        if mode == "continuation":
            target = quasi.states[:, [pair.index_a, pair.index_b]]
        out.append(
            PairSample(
                epsilon=float(eps),
                delta_phi=pair.delta_phi,
                overlap_a=pair.overlap_a,
                overlap_b=pair.overlap_b,
            )
        )
    return out
