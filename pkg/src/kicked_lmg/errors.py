"""Exception types raised by the analysis pipeline.

Plain ``ValueError`` is reserved for malformed inputs (bad J, bad index,
bad grid). The classes below mark events where the computation itself
cannot proceed: a numerical contract is violated, an iterative search
fails, or the requested structure is absent from phase space.
"""


class KickedLmgError(Exception):
    """Base class for pipeline failures."""


class SpectrumError(KickedLmgError):
    """Static spectrum violates an assumption (degeneracy, parity mixing)."""


class UnitarityError(KickedLmgError):
    """An operator that must be unitary is not, beyond tolerance."""


class IntegrationAccuracyError(KickedLmgError):
    """Energy drift between kicks exceeded the accuracy contract."""


class EnergyRangeError(KickedLmgError):
    """Requested energy lies outside the rotational-orbit family."""


class TrackingLostError(KickedLmgError):
    """Floquet pair projection fell below the overlap floor."""


class IslandNotFoundError(KickedLmgError):
    """Separatrix scan found no island on the scan line."""


class FixedPointError(KickedLmgError):
    """Newton refinement of a periodic point did not converge."""


class TracingError(KickedLmgError):
    """Separatrix branch tracing failed (bad coverage after retries)."""


class MonodromyError(KickedLmgError):
    """Monodromy finite differencing failed its consistency checks."""


class UnstableOrbitError(KickedLmgError):
    """Monodromy trace is not elliptic (|trace| >= 2)."""


class DegenerateIslandError(KickedLmgError):
    """Island area difference vanished; pendulum reduction undefined."""


class FitError(KickedLmgError):
    """Power-law fit rejected (too few points, non-positive data)."""


class ConfigError(KickedLmgError):
    """Run configuration rejected (unknown key, bad type, missing field)."""
