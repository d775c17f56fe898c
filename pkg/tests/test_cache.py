"""Disk cache for static spectra: hits, misses, and rejection paths."""

import logging

import numpy as np
import pytest

from kicked_lmg import ModelParams, cached_spectrum, compute_spectrum
from kicked_lmg.cache import load_spectrum, save_spectrum, spectrum_cache_path

PARAMS = ModelParams(j=12.0, tau=8.0, epsilon=0.0)


def _assert_spectra_equal(a, b):
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.parities, b.parities)


def test_roundtrip_is_exact(tmp_path):
    direct = compute_spectrum(PARAMS)
    first = cached_spectrum(PARAMS, cache_dir=tmp_path)
    _assert_spectra_equal(first, direct)
    path = spectrum_cache_path(tmp_path, PARAMS)
    assert path.exists()
    reloaded = load_spectrum(path, PARAMS)
    _assert_spectra_equal(reloaded, direct)
    assert not list(tmp_path.glob("*.tmp"))


def test_second_call_hits_cache(tmp_path, caplog):
    cached_spectrum(PARAMS, cache_dir=tmp_path)
    with caplog.at_level(logging.INFO, logger="kicked_lmg.cache"):
        again = cached_spectrum(PARAMS, cache_dir=tmp_path)
    assert any("cache hit" in rec.message for rec in caplog.records)
    _assert_spectra_equal(again, compute_spectrum(PARAMS))


def test_no_cache_dir_computes_directly(tmp_path):
    spec = cached_spectrum(PARAMS, cache_dir=None)
    _assert_spectra_equal(spec, compute_spectrum(PARAMS))
    assert not list(tmp_path.iterdir())


def test_corrupt_file_recomputed_and_repaired(tmp_path, caplog):
    path = spectrum_cache_path(tmp_path, PARAMS)
    cached_spectrum(PARAMS, cache_dir=tmp_path)
    path.write_bytes(b"not an archive")
    with caplog.at_level(logging.WARNING, logger="kicked_lmg.cache"):
        assert load_spectrum(path, PARAMS) is None
    assert any("unreadable" in rec.message for rec in caplog.records)
    spec = cached_spectrum(PARAMS, cache_dir=tmp_path)
    _assert_spectra_equal(spec, compute_spectrum(PARAMS))
    # the recompute path rewrites the file, so the next load succeeds
    assert load_spectrum(path, PARAMS) is not None


def test_parameter_mismatch_rejected(tmp_path, caplog):
    other = ModelParams(j=12.0, tau=8.0, epsilon=0.0, gamma_x=-0.5)
    path = spectrum_cache_path(tmp_path, PARAMS)
    save_spectrum(path, other, compute_spectrum(other))
    with caplog.at_level(logging.WARNING, logger="kicked_lmg.cache"):
        assert load_spectrum(path, PARAMS) is None
    assert any("other parameters" in rec.message for rec in caplog.records)


def test_format_version_mismatch_rejected(tmp_path, caplog):
    spec = compute_spectrum(PARAMS)
    path = tmp_path / "stale.npz"
    np.savez(
        path,
        format_version=np.array(999),
        j=np.array(PARAMS.j),
        omega0=np.array(PARAMS.omega0),
        gamma_x=np.array(PARAMS.gamma_x),
        energies=spec.energies,
        states=spec.states,
        parities=spec.parities,
    )
    with caplog.at_level(logging.WARNING, logger="kicked_lmg.cache"):
        assert load_spectrum(path, PARAMS) is None
    assert any("format tag" in rec.message for rec in caplog.records)


def test_missing_file_is_a_miss(tmp_path):
    assert load_spectrum(tmp_path / "absent.npz", PARAMS) is None


def test_cache_path_keyed_by_static_parameters(tmp_path):
    p1 = spectrum_cache_path(tmp_path, PARAMS)
    p2 = spectrum_cache_path(tmp_path, ModelParams(j=12.0, tau=3.0, epsilon=0.5))
    assert p1 == p2  # drive parameters do not enter the key
    p3 = spectrum_cache_path(tmp_path, ModelParams(j=13.0, tau=8.0, epsilon=0.0))
    assert p1 != p3
