"""Command-line experiment runner.

Verbs:
  simulate    synthesize a scenario's offsets and data matrix to CSV
  solve       run one method on a scenario, write result.json and traces
  pattern     recompute pattern.csv from a result.json weight vector
  benchmark   time the fast dual solver against the structured SDP
              (or the kernel backends with --kernels)
  experiment  run a named preset end to end (all its methods), emit
              offsets/dual/pattern CSVs, result.json, optional SVG plots

Output root: --out, else $DRIFTBEAM_OUT, else ./runs.  Every artifact is a
deterministic function of (config, seed); timing fields are excluded from
that guarantee.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .anm1d import AdmmParams, solve_sdp_1d
from .beamform import (BeamformResult, dual_polynomial_1d, pattern_gain_db,
                       radiation_pattern, smi_baseline_weights)
from .ivdst import IvdstParams
from .pipeline import default_f_grid, run_anm1d, run_anm2d, run_ivdst
from .scenarios import (Scenario, list_presets, parse_config, preset_config,
                        trial_offsets)
from .array_model import build_data_matrix

_INTERFERER_BAR_DB = -20.0


def _out_dir(args) -> Path:
    root = args.out or os.environ.get("DRIFTBEAM_OUT", "runs")
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_scenario(args) -> Scenario:
    if getattr(args, "preset", None):
        cfg = preset_config(args.preset, getattr(args, "method", None))
    else:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if getattr(args, "method", None):
            cfg["method"] = args.method
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return parse_config(cfg)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _write_offsets(sc: Scenario, path: Path) -> None:
    rows = []
    for i, s in enumerate(sc.sources):
        for m, v in enumerate(s.offset.values):
            rows.append([i, m, repr(float(v))])
    _write_csv(path, ["source", "m", "delta"], rows)


def _maybe_plot(csv_path: Path, kind: str) -> None:
    try:
        import matplotlib
        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError:
        print(f"matplotlib unavailable; skipping plot for {csv_path.name}", file=sys.stderr)
        return
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    names = data.dtype.names
    if kind == "offsets":
        for src in np.unique(data["source"]):
            sel = data["source"] == src
            ax.plot(data["m"][sel], data["delta"][sel], label=f"source {int(src)}")
        ax.set_xlabel("snapshot"), ax.set_ylabel("offset (cycles/sample)"), ax.legend()
    elif kind == "dual":
        ax.plot(data[names[0]], data[names[1]])
        ax.set_xlabel("frequency"), ax.set_ylabel("dual polynomial")
    elif kind == "pattern":
        for name in names[1:]:
            ax.plot(data[names[0]], data[name], label=name)
        ax.set_xlabel("angle (deg)"), ax.set_ylabel("gain (dB)"), ax.set_ylim(-60, 2)
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(csv_path.with_suffix(".svg"))
    plt.close(fig)


def _run_method(sc: Scenario, xstar: np.ndarray) -> tuple[BeamformResult | None, np.ndarray, float, dict]:
    """Run sc.method; returns (result-or-None, weights, wall seconds, solver info)."""
    basis = sc.basis() if sc.method != "smi" else None
    t0 = time.perf_counter()
    if sc.method == "smi":
        w = smi_baseline_weights(xstar, sc.f1_hint if sc.f1_hint is not None
                                 else sc.sources[0].carrier)
        return None, w, time.perf_counter() - t0, {"solver": "smi"}
    eps = sc.eps + sc.eps_rel * np.linalg.norm(xstar)
    if sc.method == "ivdst":
        res = run_ivdst(xstar, basis, sc.array, sc.k,
                        IvdstParams(eta=sc.eta, iters=sc.iters, seed=sc.seed),
                        gamma_frac=sc.gamma0, f1_hint=sc.f1_hint)
    elif sc.method == "anm1d":
        res = run_anm1d(xstar, basis, sc.array, sc.k,
                        AdmmParams(rho=sc.rho, max_iters=sc.max_iters,
                                   tol_primal=sc.tol, tol_dual=sc.tol, eps=eps),
                        gamma_frac=sc.gamma0, f1_hint=sc.f1_hint)
    elif sc.method == "anm2d":
        res = run_anm2d(xstar, basis, sc.array, sc.k,
                        AdmmParams(rho=sc.rho, max_iters=sc.max_iters,
                                   tol_primal=sc.tol, tol_dual=sc.tol, eps=eps),
                        gamma_frac=sc.gamma0, f1_hint=sc.f1_hint)
    else:
        raise ValueError(sc.method)
    elapsed = time.perf_counter() - t0
    info = {k: v for k, v in res.diagnostics.items()
            if isinstance(v, (str, bool, int, float))}
    return res, res.w, elapsed, info


def _result_json(sc: Scenario, w: np.ndarray, res: BeamformResult | None,
                 elapsed: float, info: dict) -> dict:
    angles = [s.angle_deg for s in sc.sources]
    gains = pattern_gain_db(w, sc.array, angles)
    return {
        "method": sc.method,
        "seed": sc.seed,
        "kernel_backend": kernels.BACKEND,
        "estimated_frequencies": [repr(float(f)) for f in res.f_tilde] if res is not None else None,
        "weights_real": [repr(float(v)) for v in w.real],
        "weights_imag": [repr(float(v)) for v in w.imag],
        "null_depths_db": {f"{a:+.1f}deg": repr(float(g - gains[0]))
                           for a, g in zip(angles[1:], gains[1:])},
        "interferer_bar_db": _INTERFERER_BAR_DB,
        "wall_seconds": elapsed,
        "solver": info,
        "config": sc.raw,
    }


def _emit(sc: Scenario, out: Path, plots: bool) -> dict:
    xstar = build_data_matrix(sc.sources, sc.array, sc.m)
    res, w, elapsed, info = _run_method(sc, xstar)
    _write_offsets(sc, out / "offsets.csv")
    if res is not None and "dual_poly" in res.diagnostics:
        grid, qv = res.diagnostics["dual_poly"]
        _write_csv(out / "dual_polynomial.csv", ["f", "q"],
                   [[repr(float(f)), repr(float(v))] for f, v in zip(grid, qv)])
        if plots:
            _maybe_plot(out / "dual_polynomial.csv", "dual")
    if res is not None and "dual_poly_2d" in res.diagnostics:
        fg, tg, q2 = res.diagnostics["dual_poly_2d"]
        rows = [[repr(float(f)), repr(float(t)), repr(float(q2[i, j]))]
                for i, t in enumerate(tg) for j, f in enumerate(fg)]
        _write_csv(out / "dual2d.csv", ["f", "theta_deg", "value"], rows)
    tg, gdb = radiation_pattern(w, sc.array, np.linspace(-90, 90, 721))
    _write_csv(out / "pattern.csv", ["theta_deg", f"gain_db_{sc.method}"],
               [[repr(float(t)), repr(float(g))] for t, g in zip(tg, gdb)])
    if plots:
        _maybe_plot(out / "offsets.csv", "offsets")
        _maybe_plot(out / "pattern.csv", "pattern")
    payload = _result_json(sc, w, res, elapsed, info)
    with open(out / "result.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    return payload


def cmd_simulate(args) -> int:
    sc = _load_scenario(args)
    out = _out_dir(args)
    xstar = build_data_matrix(sc.sources, sc.array, sc.m)
    _write_offsets(sc, out / "offsets.csv")
    rows = [[m, n, repr(float(xstar[m, n].real)), repr(float(xstar[m, n].imag))]
            for m in range(sc.m) for n in range(sc.array.n)]
    _write_csv(out / "data.csv", ["m", "n", "re", "im"], rows)
    if args.plots:
        _maybe_plot(out / "offsets.csv", "offsets")
    print(f"wrote {out}/offsets.csv and {out}/data.csv")
    return 0


def cmd_solve(args) -> int:
    sc = _load_scenario(args)
    out = _out_dir(args)
    try:
        payload = _emit(sc, out, args.plots)
    except Exception as exc:  # solver failure lands in result.json, nonzero exit
        with open(out / "result.json", "w") as fh:
            json.dump({"method": sc.method, "error": str(exc), "config": sc.raw}, fh, indent=2)
        print(f"solver failed: {exc}", file=sys.stderr)
        return 1
    freqs = payload["estimated_frequencies"]
    print(f"method={sc.method} frequencies={freqs} "
          f"nulls={payload['null_depths_db']} ({payload['wall_seconds']:.2f}s)")
    return 0


def cmd_pattern(args) -> int:
    with open(args.result) as fh:
        payload = json.load(fh)
    sc = parse_config(payload["config"])
    w = np.array([float(r) for r in payload["weights_real"]]) + \
        1j * np.array([float(r) for r in payload["weights_imag"]])
    out = _out_dir(args)
    tg, gdb = radiation_pattern(w, sc.array, np.linspace(-90, 90, 721))
    _write_csv(out / "pattern.csv", ["theta_deg", f"gain_db_{payload['method']}"],
               [[repr(float(t)), repr(float(g))] for t, g in zip(tg, gdb)])
    if args.plots:
        _maybe_plot(out / "pattern.csv", "pattern")
    print(f"wrote {out}/pattern.csv")
    return 0


def cmd_benchmark(args) -> int:
    if args.kernels:
        from .kernels.bench import run
        run()
        return 0
    cfg = preset_config(args.preset or "exp1-static", "ivdst")
    if args.m:
        cfg["m"] = args.m
    sc_fast = parse_config(cfg)
    cfg_sdp = preset_config(args.preset or "exp1-static", "anm1d")
    if args.m:
        cfg_sdp["m"] = args.m
    sc_sdp = parse_config(cfg_sdp)
    xstar = build_data_matrix(sc_fast.sources, sc_fast.array, sc_fast.m)
    t0 = time.perf_counter()
    res_fast, _, t_fast, _ = _run_method(sc_fast, xstar)
    t_fast = time.perf_counter() - t0
    xstar2 = build_data_matrix(sc_sdp.sources, sc_sdp.array, sc_sdp.m)
    t0 = time.perf_counter()
    res_sdp, _, t_sdp, _ = _run_method(sc_sdp, xstar2)
    t_sdp = time.perf_counter() - t0
    report = {
        "preset": args.preset or "exp1-static",
        "m": sc_fast.m,
        "ivdst_seconds": t_fast,
        "anm1d_seconds": t_sdp,
        "ratio": t_fast / t_sdp,
        "ivdst_frequencies": [float(f) for f in res_fast.f_tilde],
        "anm1d_frequencies": [float(f) for f in res_sdp.f_tilde],
    }
    out = _out_dir(args)
    with open(out / "benchmark.json", "w") as fh:
        json.dump(report, fh, indent=2)
    print(f"ivdst {t_fast:.2f}s vs anm1d {t_sdp:.2f}s -> ratio {report['ratio']:.3f}")
    return 0


def cmd_experiment(args) -> int:
    name = args.preset
    out = _out_dir(args) / name
    out.mkdir(parents=True, exist_ok=True)
    if name.startswith("exp4-hist"):
        return _run_histogram(name, out, args)
    base = preset_config(name)
    methods = {"exp1": ("anm1d", "ivdst", "smi"),
               "exp2": ("ivdst", "smi"),
               "exp3": ("anm2d", "smi")}[name.split("-")[0]]
    summary = {}
    for meth in methods:
        sc = parse_config(preset_config(name, meth))
        sub = out / meth
        sub.mkdir(exist_ok=True)
        payload = _emit(sc, sub, args.plots)
        summary[meth] = {"frequencies": payload["estimated_frequencies"],
                         "null_depths_db": payload["null_depths_db"],
                         "wall_seconds": payload["wall_seconds"]}
        print(f"{name}/{meth}: nulls {payload['null_depths_db']} "
              f"({payload['wall_seconds']:.2f}s)")
    with open(out / "summary.json", "w") as fh:
        json.dump({"preset": name, "methods": summary, "base_config": base}, fh, indent=2)
    return 0


def _run_histogram(name: str, out: Path, args) -> int:
    typ = name.split("-")[-1]
    trials = args.trials
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    rows = []
    for trial in range(trials):
        cfg = preset_config(f"exp3-2d-{typ}", "anm2d")
        offs = trial_offsets(typ, cfg["m"], rng)
        for src, off in zip(cfg["sources"], offs):
            src["offset"] = off
        sc = parse_config(cfg)
        xstar = build_data_matrix(sc.sources, sc.array, sc.m)
        angles = [s.angle_deg for s in sc.sources]
        try:
            res, w, _, _ = _run_method(sc, xstar)
            g = pattern_gain_db(w, sc.array, angles)
            rowa = [g[1] - g[0], g[2] - g[0]]
        except Exception:
            rowa = [np.nan, np.nan]
        w_smi = smi_baseline_weights(xstar, sc.sources[0].carrier)
        g = pattern_gain_db(w_smi, sc.array, angles)
        rows.append([trial, repr(float(rowa[0])), repr(float(rowa[1])),
                     repr(float(g[1] - g[0])), repr(float(g[2] - g[0]))])
        print(f"trial {trial}: anm2d nulls ({rowa[0]:.1f}, {rowa[1]:.1f}) dB, "
              f"smi ({g[1] - g[0]:.1f}, {g[2] - g[0]:.1f}) dB")
    _write_csv(out / "histogram.csv",
               ["trial", "anm2d_null_m60_db", "anm2d_null_p20_db",
                "smi_null_m60_db", "smi_null_p20_db"], rows)
    print(f"wrote {out}/histogram.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="driftbeam",
                                description="Beamforming robust to time-varying "
                                            "carrier frequency offset")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, preset_ok=True):
        if preset_ok:
            g = sp.add_mutually_exclusive_group(required=True)
            g.add_argument("--config", help="scenario JSON file")
            g.add_argument("--preset", choices=list_presets() +
                           ["exp1", "exp2-m300", "exp3-2d", "exp4-hist"])
        sp.add_argument("--method", choices=("smi", "anm1d", "ivdst", "anm2d"))
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory (default $DRIFTBEAM_OUT or ./runs)")
        sp.add_argument("--plots", action="store_true", help="also write SVG plots")

    common(sub.add_parser("simulate", help="write offsets.csv and data.csv"))
    common(sub.add_parser("solve", help="run one method, write result.json"))

    sp = sub.add_parser("pattern", help="pattern.csv from a result.json")
    sp.add_argument("--result", required=True)
    sp.add_argument("--out")
    sp.add_argument("--plots", action="store_true")

    sp = sub.add_parser("benchmark", help="time ivdst against anm1d on one preset")
    sp.add_argument("--preset", choices=list_presets())
    sp.add_argument("--m", type=int, help="override snapshot count")
    sp.add_argument("--kernels", action="store_true",
                    help="benchmark compiled vs numpy kernels instead")
    sp.add_argument("--out")

    sp = sub.add_parser("experiment", help="run a full preset")
    sp.add_argument("preset", choices=list_presets() +
                    ["exp1", "exp2-m300", "exp3-2d", "exp4-hist"])
    sp.add_argument("--trials", type=int, default=20, help="exp4-hist trial count")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.add_argument("--plots", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"simulate": cmd_simulate, "solve": cmd_solve, "pattern": cmd_pattern,
                "benchmark": cmd_benchmark, "experiment": cmd_experiment}
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
