"""Command-line surface of the analysis pipeline.

Every subcommand reads one validated run configuration, writes its
results under the configured output directory, and echoes the fully
resolved configuration next to them. All tables are CSV with floats in
shortest round-trip form and a fixed row order, so reruns of the same
configuration are byte-identical. Exit codes: 0 success, 2 rejected
configuration, 3 violated numerical contract, 4 completed with failed
rows.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .cache import cached_spectrum
from .classical import (
    PhasePoint,
    classical_period,
    find_resonant_energy,
    poincare_section,
)
from .config import RunConfig, echo_config, load_config
from .errors import ConfigError, FitError, KickedLmgError
from .model import ModelParams, calibrate_tau, select_resonant_index
from .scaling import (
    ChainRow,
    FitResult,
    chain_table,
    loglog_fit,
    quantum_splitting_sweep,
)

log = logging.getLogger(__name__)

POINCARE_HEADER = "seed_id,iter,phi,z"
EXTRACTION_HEADER = (
    "J,r,s,tau,epsilon,S_plus,S_minus,trM,detM,I_rs,m_rs,K_rs,delta_rat,delta_harm"
)
SPLITTING_HEADER = "J,r,s,tau,epsilon,delta_phi,delta_scaled,overlap,status"
MASTER_HEADER = "J,r,s,tau,epsilon,delta_quantum_scaled,delta_rat,delta_harm,status"
SUMMARY_HEADER = "J,r,k_R,tau_q"


def _fmt(x) -> str:
    ## shortest round-trip decimal; nan is the explicit gap marker
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header: str, rows: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join([header, *rows]) + "\n")


def _map_tasks(fn, items, workers: int) -> list:
    """Run fn over items, preserving item order in the results."""
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _resonant_return_time(cfg: RunConfig) -> float:
    """Flow return time the chain must match (r map steps, s cycles)."""
    if cfg.resonance.t_target is not None:
        return cfg.resonance.t_target
    base = ModelParams(
        j=cfg.model.j_list[0], omega0=cfg.model.omega0, gamma_x=cfg.model.gamma_x
    )
    return classical_period(cfg.resonance.e_r, base, quad_tol=cfg.numerics.quad_tol)


def _resonant_energy(cfg: RunConfig, t_res: float) -> float:
    if cfg.resonance.e_r is not None:
        return cfg.resonance.e_r
    base = ModelParams(
        j=cfg.model.j_list[0], omega0=cfg.model.omega0, gamma_x=cfg.model.gamma_x
    )
    return find_resonant_energy(t_res, base)


def _extract_kwargs(cfg: RunConfig) -> dict:
    num = cfg.numerics
    return {
        "scan_kwargs": {
            "n_grid": num.n_grid,
            "n_iter": num.n_iter,
            "z_tol": num.z_tol,
            "jump_threshold": num.jump_threshold,
        },
        "mono_kwargs": {"fd_step": num.fd_step},
    }


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.output.directory)
    d.mkdir(parents=True, exist_ok=True)
    return d


# ---------------------------------------------------------------------------
# spectrum


def cmd_spectrum(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    cache_dir = out / "cache"
    t_res = _resonant_return_time(cfg)
    rows = []
    for j in cfg.model.j_list:
        params = ModelParams(j=j, omega0=cfg.model.omega0, gamma_x=cfg.model.gamma_x)
        spectrum = cached_spectrum(params, cache_dir=cache_dir)
        for r in (1, 2):
            k_r = select_resonant_index(spectrum, t_res, r)
            tau_q = float(calibrate_tau(spectrum, k_r, r, 1))
            print(f"J={j:g} r={r} k_R={k_r} tau_q={tau_q!r}")
            rows.append(",".join([_fmt(j), str(r), str(k_r), _fmt(tau_q)]))
    _write_csv(out / "spectrum_summary.csv", SUMMARY_HEADER, rows)
    return 0


# ---------------------------------------------------------------------------
# poincare


def cmd_poincare(cfg: RunConfig, args) -> int:
    if cfg.poincare is None:
        raise ConfigError("poincare command needs a poincare config section")
    out = _out_dir(cfg)
    pc = cfg.poincare

    def one_file(task):
        tau, eps = task
        params = ModelParams(
            j=cfg.model.j_list[0],
            omega0=cfg.model.omega0,
            gamma_x=cfg.model.gamma_x,
            tau=tau,
            epsilon=eps,
            r=cfg.resonance.r,
            s=cfg.resonance.s,
        )
        rows = []
        for sid, (phi, z) in enumerate(pc.seeds):
            try:
                pts = poincare_section([PhasePoint(phi, z)], params, pc.n_iter)
            except KickedLmgError as exc:
                raise KickedLmgError(
                    f"seed {sid} at tau={tau!r} eps={eps!r} failed: {exc}"
                ) from exc
            for _, it, p, zz in pts:
                rows.append(",".join([str(sid), str(int(it)), _fmt(float(p)), _fmt(float(zz))]))
        path = out / f"poincare_tau{tau!r}_eps{eps!r}.csv"
        _write_csv(path, POINCARE_HEADER, rows)
        return path

    tasks = [(tau, eps) for tau in pc.taus for eps in pc.epsilons]
    for path in _map_tasks(one_file, tasks, args.workers):
        log.info("wrote %s", path)
    return 0


# ---------------------------------------------------------------------------
# splitting (quantum sweep only)


def cmd_splitting(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    t_res = _resonant_return_time(cfg)
    cache_dir = out / "cache"

    def one_j(j):
        return quantum_splitting_sweep(
            j,
            cfg.resonance.r,
            cfg.resonance.s,
            t_res,
            cfg.drive.epsilons,
            mode=cfg.numerics.tracking_mode,
            overlap_floor=cfg.numerics.overlap_floor,
            cache_dir=cache_dir,
        )

    sweeps = _map_tasks(one_j, list(cfg.model.j_list), args.workers)
    rows, bad = [], 0
    for sw in sweeps:
        for q in sw.rows:
            bad += q.status != "ok"
            rows.append(
                ",".join(
                    [
                        _fmt(q.j), str(q.r), str(q.s), _fmt(q.tau), _fmt(q.epsilon),
                        _fmt(q.delta_phi), _fmt(q.delta_scaled), _fmt(q.overlap), q.status,
                    ]
                )
            )
    _write_csv(out / "splitting.csv", SPLITTING_HEADER, rows)
    if bad:
        log.warning("%d splitting rows did not track", bad)
        return 4
    return 0


# ---------------------------------------------------------------------------
# pendulum (classical chain extraction)


def _chain_csv_rows(cfg: RunConfig, chain: list[ChainRow], tau_ref: float) -> list[str]:
    """Extraction rows joined across spin sizes; harmonic column is the
    only J-dependent entry."""
    r, s = cfg.resonance.r, cfg.resonance.s
    rows = []
    for j in cfg.model.j_list:
        hbar = 1.0 / j
        for c in chain:
            if c.status == "ok":
                d_rat = 2.0 * abs(c.strength)
                d_harm = hbar * r * math.sqrt(2.0 * abs(c.strength) / c.mass)
            else:
                d_rat = d_harm = math.nan
            rows.append(
                ",".join(
                    [
                        _fmt(float(j)), str(r), str(s), _fmt(tau_ref), _fmt(c.epsilon),
                        _fmt(c.s_plus), _fmt(c.s_minus), _fmt(c.trace), _fmt(c.det),
                        _fmt(c.action), _fmt(c.mass), _fmt(c.strength),
                        _fmt(d_rat), _fmt(d_harm),
                    ]
                )
            )
    return rows


def _run_chain(cfg: RunConfig, args, epsilons) -> tuple[list[ChainRow], float]:
    t_res = _resonant_return_time(cfg)
    e_r = _resonant_energy(cfg, t_res)
    r, s = cfg.resonance.r, cfg.resonance.s
    tau_ref = s * t_res / r
    base = ModelParams(
        j=cfg.model.j_list[0],
        omega0=cfg.model.omega0,
        gamma_x=cfg.model.gamma_x,
        tau=tau_ref,
        r=r,
        s=s,
    )
    kwargs = _extract_kwargs(cfg)
    if args.workers > 1:
        chains = _map_tasks(
            lambda eps: chain_table(base, [eps], resonant_energy=e_r, **kwargs),
            list(epsilons),
            args.workers,
        )
        chain = [row for part in chains for row in part]
    else:
        chain = chain_table(base, epsilons, resonant_energy=e_r, **kwargs)
    return chain, tau_ref


def cmd_pendulum(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    chain, tau_ref = _run_chain(cfg, args, cfg.drive.epsilons)
    rows = _chain_csv_rows(cfg, chain, tau_ref)
    path = out / f"pendulum_r{cfg.resonance.r}s{cfg.resonance.s}.csv"
    _write_csv(path, EXTRACTION_HEADER, rows)
    log.info("wrote %s", path)
    bad = sum(c.status != "ok" for c in chain)
    if bad:
        log.warning("%d extraction points failed", bad)
        return 4
    return 0


# ---------------------------------------------------------------------------
# sweep (full pipeline) and fit


def _parse_master(path: Path) -> dict[tuple, list[str]]:
    """Existing master rows grouped by spin size, keyed (J, r, s)."""
    groups: dict[tuple, list[str]] = {}
    lines = path.read_text().splitlines()
    if not lines or lines[0] != MASTER_HEADER:
        raise ConfigError(f"{path} is not a sweep master table")
    for line in lines[1:]:
        parts = line.split(",")
        key = (float(parts[0]), int(parts[1]), int(parts[2]))
        groups.setdefault(key, []).append(line)
    return groups


def _master_rows_for(sw, chain_by_eps: dict[float, ChainRow]) -> tuple[list[str], int]:
    rows, bad = [], 0
    hbar = 1.0 / sw.j
    for q in sw.rows:
        c = chain_by_eps.get(q.epsilon)
        classical_ok = c is not None and c.status == "ok"
        if q.status == "ok" and classical_ok:
            d_rat = 2.0 * abs(c.strength)
            d_harm = hbar * q.r * math.sqrt(2.0 * abs(c.strength) / c.mass)
            status = "ok"
        else:
            d_rat = d_harm = math.nan
            status = q.status if q.status != "ok" else "failed"
        bad += status != "ok"
        rows.append(
            ",".join(
                [
                    _fmt(sw.j), str(sw.r), str(sw.s), _fmt(sw.tau), _fmt(q.epsilon),
                    _fmt(q.delta_scaled), _fmt(d_rat), _fmt(d_harm), status,
                ]
            )
        )
    return rows, bad


def cmd_sweep(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    master_path = out / "sweep_master.csv"
    epsilons = cfg.drive.epsilons
    r, s = cfg.resonance.r, cfg.resonance.s
    t_res = _resonant_return_time(cfg)

    reusable: dict[tuple, list[str]] = {}
    if args.resume and master_path.exists():
        for key, lines in _parse_master(master_path).items():
            got = [line.split(",")[4] for line in lines]
            want = [_fmt(float(e)) for e in epsilons]
            # a continuation sweep cannot restart mid-grid, so only
            # complete per-J groups are reusable
            if key[1] == r and key[2] == s and got == want:
                reusable[key] = lines
        if reusable:
            log.info("resume: keeping %d completed spin sizes", len(reusable))

    chain, tau_ref = _run_chain(cfg, args, epsilons)
    chain_by_eps = {c.epsilon: c for c in chain}
    pend_path = out / f"pendulum_r{r}s{s}.csv"
    _write_csv(pend_path, EXTRACTION_HEADER, _chain_csv_rows(cfg, chain, tau_ref))

    def one_j(j):
        if (float(j), r, s) in reusable:
            return None
        return quantum_splitting_sweep(
            float(j),
            r,
            s,
            t_res,
            epsilons,
            mode=cfg.numerics.tracking_mode,
            overlap_floor=cfg.numerics.overlap_floor,
            cache_dir=out / "cache",
        )

    sweeps = _map_tasks(one_j, list(cfg.model.j_list), args.workers)
    all_rows, bad = [], 0
    for j, sw in zip(cfg.model.j_list, sweeps):
        if sw is None:
            all_rows.extend(reusable[(float(j), r, s)])
            continue
        rows, nbad = _master_rows_for(sw, chain_by_eps)
        all_rows.extend(rows)
        bad += nbad
    _write_csv(master_path, MASTER_HEADER, all_rows)
    log.info("wrote %s", master_path)

    fits = _fits_from_master(master_path)
    _write_fits(out / "fits.json", fits)
    bad += sum(c.status != "ok" for c in chain)
    if bad:
        log.warning("%d sweep rows carry failures", bad)
        return 4
    return 0


def _crossing_from_columns(eps: np.ndarray, d_rat: np.ndarray, d_harm: np.ndarray):
    """Kick strength where the chain prediction overtakes the harmonic
    one, by log-linear interpolation on the joined sweep columns."""
    good = np.isfinite(d_rat) & np.isfinite(d_harm) & (d_rat > 0) & (d_harm > 0)
    e, a, h = eps[good], d_rat[good], d_harm[good]
    if e.size < 2:
        return None
    f = np.log(a / h)
    idx = np.where(f[:-1] * f[1:] <= 0)[0]
    if idx.size == 0:
        return None
    i = int(idx[0])
    t = f[i] / (f[i] - f[i + 1])
    return float(np.exp(np.log(e[i]) + t * (np.log(e[i + 1]) - np.log(e[i]))))


def _fit_entry(resonance: str, fit: FitResult | None, j_list: list[float]) -> dict:
    return {
        "resonance": resonance,
        "slope": None if fit is None else fit.slope,
        "intercept": None if fit is None else fit.intercept,
        "residual_rms": None if fit is None else fit.residual_rms,
        "n_points": 0 if fit is None else fit.n_points,
        "J_list": j_list,
    }


def _fits_from_master(path: Path) -> dict:
    """Strength and validity-edge power laws from a sweep master table."""
    groups = _parse_master(path)
    by_rs: dict[tuple[int, int], dict[float, list[list[str]]]] = {}
    for (j, r, s), lines in groups.items():
        by_rs.setdefault((r, s), {})[j] = [line.split(",") for line in lines]
    fits = {"strength": [], "validity_edge": []}
    for (r, s), per_j in sorted(by_rs.items()):
        label = f"{r}:{s}"
        j_list = sorted(per_j)
        first = per_j[j_list[0]]
        eps, ks = [], []
        for parts in first:
            if parts[8] == "ok":
                eps.append(float(parts[4]))
                ks.append(0.5 * float(parts[6]))
        try:
            sfit = loglog_fit(eps, ks)
        except FitError as exc:
            log.warning("strength fit unavailable for %s: %s", label, exc)
            sfit = None
        fits["strength"].append(_fit_entry(label, sfit, j_list))
        crossings, j_used = [], []
        for j in j_list:
            parts = np.array(per_j[j])
            cross = _crossing_from_columns(
                parts[:, 4].astype(float),
                parts[:, 6].astype(float),
                parts[:, 7].astype(float),
            )
            if cross is None:
                log.warning("no prediction crossing bracketed for %s at J=%g", label, j)
                continue
            crossings.append(cross)
            j_used.append(j)
        try:
            efit = loglog_fit(j_used, crossings)
        except FitError as exc:
            log.warning("validity-edge fit unavailable for %s: %s", label, exc)
            efit = None
        fits["validity_edge"].append(_fit_entry(label, efit, j_used))
    return fits


def _write_fits(path: Path, fits: dict) -> None:
    path.write_text(json.dumps(fits, indent=2) + "\n")
    log.info("wrote %s", path)


def cmd_fit(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    master_path = out / "sweep_master.csv"
    if not master_path.exists():
        raise ConfigError(f"no sweep master table at {master_path}; run sweep first")
    fits = _fits_from_master(master_path)
    _write_fits(out / "fits.json", fits)
    return 0


# ---------------------------------------------------------------------------
# entry point


COMMANDS = {
    "spectrum": cmd_spectrum,
    "poincare": cmd_poincare,
    "splitting": cmd_splitting,
    "pendulum": cmd_pendulum,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kicked-lmg",
        description="Resonance analysis of a periodically kicked collective spin.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", default=None, help="YAML run configuration")
        p.add_argument("--workers", type=int, default=1, help="parallel task count")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument("--resume", action="store_true", help="keep completed rows")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg = dataclasses.replace(
                cfg, output=dataclasses.replace(cfg.output, directory=args.out)
            )
        echo_config(cfg, cfg.output.directory)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KickedLmgError as exc:
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
