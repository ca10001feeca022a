"""Command-line harness: one subcommand per experiment kind, JSON config
in, CSV plus JSON manifest out.

Exit codes: 0 success, 2 configuration/validation failure, 3 numerical
abort (quadrature failure or mode overflow).  Reruns with the same config
produce byte-identical CSV; the manifest differs only inside its
"volatile" block (timestamp, threads, seed)."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import divergence as dv
from . import estimates as es
from . import spectral as sp
from . import weights as wt
from .config import ConfigError, ExperimentConfig, KINDS
from .errors import NumericalError, ParameterError
from .moduli import ITERATED_LOG_PEAK, check_axioms, make_canonical, osgood_indicator
from .runio import config_sha256, jsonable, utc_now_iso, write_csv, write_manifest

BASE_NOTES = ("fourier normalization: plain mode sums, no 2*pi factors",)
ITLOG_NOTE = (
    f"iterated_log modulus uses its closed form up to the argmax s* = "
    f"{ITERATED_LOG_PEAK:.12g} and is constant beyond (monotone concave extension)"
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osgoodlab",
        description="desk-scale stability experiments for backward parabolic evolution",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    env_threads = os.environ.get("OSGOODLAB_THREADS")
    default_threads = int(env_threads) if env_threads else 1
    for kind in KINDS:
        cmd = sub.add_parser(kind, help=f"run a '{kind}' experiment")
        cmd.add_argument("--config", required=True, help="path to the JSON experiment config")
        cmd.add_argument("--out", default=".", help="output directory (default: cwd)")
        cmd.add_argument("--threads", type=int, default=default_threads,
                         help="worker threads (results are thread-count independent)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="reserved for future randomized grids; current runs are deterministic")
    return parser


def _fail(messages: list[str]) -> int:
    for message in messages:
        print(f"config error: {message}", file=sys.stderr)
    return 2


def _notes_for(cfg: ExperimentConfig) -> list[str]:
    notes = list(BASE_NOTES)
    tags = []
    for spec in (cfg.modulus, getattr(cfg.coefficients, "modulus", None)):
        if spec is not None:
            tags.append(spec.tag)
    if cfg.weight is not None and cfg.weight.omega is not None:
        tags.append(cfg.weight.omega.tag)
    if cfg.divergence is not None:
        tags.append(cfg.divergence.target)
    if "iterated_log" in tags:
        notes.append(ITLOG_NOTE)
    return notes


def run(cfg: ExperimentConfig, out_dir: Path, threads: int, seed: int | None) -> tuple[Path, Path]:
    """Execute the experiment; returns (csv path, manifest path)."""
    runner = _RUNNERS[cfg.kind]
    header, rows, results = runner(cfg)
    csv_path = out_dir / cfg.output_csv()
    write_csv(csv_path, header, rows)
    manifest = {
        "tool": "osgoodlab",
        "version": __version__,
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "config_sha256": config_sha256(cfg.to_dict()),
        "outputs": {"csv": csv_path.name},
        "results": jsonable(results),
        "notes": _notes_for(cfg),
        "volatile": {
            "created_utc": utc_now_iso(),
            "threads": threads,
            "seed": seed,
        },
    }
    manifest_path = out_dir / "manifest.json"
    write_manifest(manifest_path, manifest)
    return csv_path, manifest_path


def _run_moduli_check(cfg: ExperimentConfig):
    mu = cfg.modulus.build()
    eps = np.sort(cfg.grids.eps_values())[::-1]
    report = osgood_indicator(mu, eps, rtol=cfg.tolerance("osgood_rtol"))
    grid = np.linspace(1e-3, min(1.0, 1.0), 1000)
    axioms = check_axioms(mu, grid, tol=cfg.tolerance("axiom_tol"))
    rows = list(zip(report.epsilons, report.integrals))
    results = {
        "classification": report.classification,
        "rule": report.rule,
        "axioms": {
            "increasing": axioms.increasing,
            "concave": axioms.concave,
            "vanishes_at_zero": axioms.vanishes_at_zero,
        },
    }
    return ["epsilon", "integral"], rows, results


def _run_weights_solve(cfg: ExperimentConfig):
    spec = cfg.weight
    if spec.kind == "loglip_ode":
        weight = wt.solve_loglip_weight(spec.lam, spec.y0, spec.psi0, spec.phi0, spec.y1)
    else:
        weight = wt.solve_osgood_weight(spec.lam, spec.k_A, spec.omega.build(),
                                        spec.y0, spec.psi0, spec.phi0, spec.y1)
    rows = [tuple(row) for row in weight.table()]
    results = {
        "truncated": weight.truncated,
        "truncation_reason": weight.truncation_reason,
        "y1_effective": weight.y1,
    }
    return ["y", "psi", "phi"], rows, results


def _initial_field(cfg: ExperimentConfig, n: int) -> sp.SpectralField:
    spec = cfg.initial_field
    if spec.kind == "gaussian":
        grid = sp.frequency_grid(n, cfg.grids.xi_max, cfg.grids.xi_n_linear,
                                 cfg.grids.xi_n_geometric)
        return sp.gaussian_data(n, spec.eps, spec.K, grid)
    xi = np.asarray(spec.xi, dtype=float).reshape(-1, n)
    amp_im = spec.amp_im if spec.amp_im is not None else tuple(0.0 for _ in spec.xi)
    amp = np.asarray(spec.amp_re, dtype=float) + 1j * np.asarray(amp_im, dtype=float)
    weights = np.asarray(spec.weights, dtype=float) if spec.weights is not None else None
    return sp.SpectralField(n=n, xi=xi, amp=amp, weights=weights)


def _run_evolve(cfg: ExperimentConfig):
    cs = cfg.coefficients.build()
    field = _initial_field(cfg, cs.n)
    evolved = sp.evolve(field, cs, cfg.params["t_target"], rtol=cfg.tolerance("evolve_rtol"))
    header, rows = sp.field_rows(evolved)
    results = {"l2_norm": sp.l2_norm(evolved), "time": evolved.time, "modes": evolved.m}
    return header, rows, results


def _run_energy_check(cfg: ExperimentConfig):
    cs = cfg.coefficients.build()
    omega = cfg.modulus.build()
    spec = cfg.weight
    lam = cfg.params.get("lam", spec.lam)
    weight = wt.solve_osgood_weight(lam, spec.k_A, spec.omega.build(), spec.y0,
                                    spec.psi0, spec.phi0, spec.y1) \
        if spec.kind == "osgood_ode" else \
        wt.solve_loglip_weight(lam, spec.y0, spec.psi0, spec.phi0, spec.y1)
    pack = es.EnergyEstimateParams(
        gamma=cfg.params["gamma"], beta=cfg.params["beta"], tau=cfg.params["tau"],
        alpha=cfg.params["alpha"], sigma=cfg.params["sigma"], lam=lam,
        weight=weight, omega=omega, k_A=cfg.params["k_A"],
        sigma_bar=cfg.params.get("sigma_bar"),
    )
    nodes = sp.frequency_grid_1d(cfg.grids.xi_max, cfg.grids.xi_n_linear,
                                 cfg.grids.xi_n_geometric)[0][:, 0]
    xis = np.unique(np.abs(nodes))
    amp0 = cfg.params["amp0"]
    rows = []
    n_hold = 0
    for xi in xis:
        rep = es.check_mode_energy(cs, xi, amp0, pack, quad_rtol=cfg.tolerance("quad_rtol"))
        rows.append((float(xi), rep.lhs, rep.rhs, rep.holds, rep.margin))
        n_hold += int(rep.holds)
    results = {"modes_checked": len(rows), "modes_holding": n_hold,
               "all_hold": n_hold == len(rows)}
    return ["xi", "lhs", "rhs", "holds", "margin"], rows, results


def _run_stability_modulus(cfg: ExperimentConfig):
    cs = cfg.coefficients.build()
    D, T, T_prime = cfg.params["D"], cfg.params["T"], cfg.params["T_prime"]
    eps = np.sort(cfg.grids.eps_values())
    xi_nodes = sp.frequency_grid_1d(cfg.grids.xi_max, cfg.grids.xi_n_linear,
                                    cfg.grids.xi_n_geometric)[0]
    t_grid = np.unique(np.concatenate([cfg.grids.t_values(), [T_prime, T]]))
    table = es.stability_modulus(cs, D, T, T_prime, eps, xi_nodes, t_grid)
    kind = cfg.fit or "hoelder"
    bound = es.fit_bound(table, kind)
    if kind == "hoelder":
        constants = {"M": bound.M, "delta": bound.delta}
        header = ["epsilon", "S", "bound_kind", "M", "delta"]
        tail = (bound.M, bound.delta)
    elif kind == "loglip":
        constants = {"M": bound.M, "N": bound.N, "beta": bound.beta}
        header = ["epsilon", "S", "bound_kind", "M", "N", "beta"]
        tail = (bound.M, bound.N, bound.beta)
    else:
        constants = {"strictly_increasing": bound.diagnostics["strictly_increasing"],
                     "max_jump": bound.diagnostics["max_jump"]}
        header = ["epsilon", "S", "bound_kind"]
        tail = ()
    rows = [(e, s, kind) + tail for e, s in zip(table.eps, table.S)]
    results = {"bound_kind": kind, "constants": constants,
               "diagnostics": bound.diagnostics, "t_star": list(table.t_star)}
    return header, rows, results


def _run_divergence(cfg: ExperimentConfig):
    spec = cfg.divergence
    family = dv.build_family(spec.target, spec.k_max, spec.tuning())
    if spec.N is not None:
        table = dv.loglip_ratio(family, spec.N, spec.delta)
    else:
        table = dv.hoelder_ratio(family, spec.delta)
    header, rows = dv.family_rows(family, table)
    results = {
        "target": spec.target,
        "members": len(family.members),
        "seminorm_bound": family.seminorm_bound,
        "schedule": {"h0": family.tuning.h0, "xi_scale": family.tuning.xi_scale},
        "notes": list(family.notes),
        "ratio_kind": "loglip" if spec.N is not None else "hoelder",
        "delta": spec.delta,
    }
    return header, rows, results


_RUNNERS = {
    "moduli-check": _run_moduli_check,
    "weights-solve": _run_weights_solve,
    "evolve": _run_evolve,
    "energy-check": _run_energy_check,
    "stability-modulus": _run_stability_modulus,
    "divergence": _run_divergence,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        return _fail(["--threads: must be at least 1"])

    config_path = Path(args.config)
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as exc:
        return _fail([f"{config_path}: {exc}"])
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return _fail([f"{config_path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"])

    try:
        cfg = ExperimentConfig.from_dict(data)
    except ConfigError as exc:
        return _fail(exc.problems)
    if cfg.kind != args.command:
        return _fail([f"kind: config says {cfg.kind!r} but subcommand is {args.command!r}"])

    out_dir = Path(args.out)
    try:
        csv_path, manifest_path = run(cfg, out_dir, args.threads, args.seed)
    except (ConfigError, ParameterError) as exc:
        return _fail([str(exc)])
    except NumericalError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        for key, value in exc.diagnostics.items():
            print(f"  {key}: {value}", file=sys.stderr)
        return 3
    print(csv_path)
    print(manifest_path)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
