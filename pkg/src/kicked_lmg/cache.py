"""Disk cache for static spectra.

Diagonalizing H0 is the only quantum step worth caching: sweeps touch
the same (J, omega0, gamma_x) triple hundreds of times. Files are .npz
archives written atomically (tmp file + rename) and carry a format tag;
anything unreadable or mismatched is recomputed with a warning rather
than trusted.
"""

from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from .model import ModelParams, StaticSpectrum, compute_spectrum

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


def spectrum_cache_path(cache_dir: str | Path, params: ModelParams) -> Path:
    name = f"spectrum_J{params.j!r}_w{params.omega0!r}_g{params.gamma_x!r}.npz"
    return Path(cache_dir) / name


def save_spectrum(path: Path, params: ModelParams, spectrum: StaticSpectrum) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            np.savez(
                fh,
                format_version=np.array(FORMAT_VERSION),
                j=np.array(params.j),
                omega0=np.array(params.omega0),
                gamma_x=np.array(params.gamma_x),
                energies=spectrum.energies,
                states=spectrum.states,
                parities=spectrum.parities,
            )
        os.replace(tmp, path)  # atomic on POSIX
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_spectrum(path: Path, params: ModelParams) -> StaticSpectrum | None:
    """Load a cached spectrum, or None when absent, stale, or corrupt."""
    path = Path(path)
    if not path.exists():
        return None
    try:
        with np.load(path) as data:
            if int(data["format_version"]) != FORMAT_VERSION:
                log.warning("cache %s has old format tag; recomputing", path.name)
                return None
            meta = (float(data["j"]), float(data["omega0"]), float(data["gamma_x"]))
            if meta != (params.j, params.omega0, params.gamma_x):
                log.warning("cache %s keyed to other parameters; recomputing", path.name)
                return None
            return StaticSpectrum(
                energies=data["energies"],
                states=data["states"],
                parities=data["parities"],
            )
    except (OSError, ValueError, KeyError, EOFError) as exc:
        log.warning("cache %s unreadable (%s); recomputing", path.name, exc)
        return None


def cached_spectrum(params: ModelParams, cache_dir: str | Path | None = None) -> StaticSpectrum:
    """Fetch the spectrum for params, using the disk cache when given."""
    if cache_dir is None:
        return compute_spectrum(params)
    path = spectrum_cache_path(cache_dir, params)
    spec = load_spectrum(path, params)
    if spec is not None:
        log.info("cache hit %s", path.name)
        return spec
    spec = compute_spectrum(params)
    save_spectrum(path, params, spec)
    return spec
