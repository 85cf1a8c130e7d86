"""Command-line interface.

Subcommands:
  design source-enum | design glm   penalty design, JSON result to stdout
  select source-enum | select sinusoids   order selection from a CSV file
  simulate                          SNR sweeps, CSV output (+ run manifest)
  ustat                             largest-eigenvalue-ratio CDF dump

Every command is deterministic given --seed; a manifest object with the
resolved parameters, seed, tool version and timestamp accompanies every
output (inside the JSON for design/select, on the side channel for the CSV
commands: stdout when the CSV goes to a file, stderr otherwise).

Exit codes: 0 success, 2 invalid or infeasible arguments, 3 malformed input
data.

Input CSV schemas: sensor batches have header re_0,im_0,...,re_{p-1},im_{p-1}
and one row per time sample; single-channel observations have header re,im.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .criteria import PenaltyRule
from .glm import build_sinusoid_scenario, design_nu_glm, estimate_order_glm
from .simulate import (
    DEFAULT_SWEEP_TRIALS,
    SweepConfig,
    overlay_analytics,
    run_sweep,
    write_sweep_csv,
)
from .source_enum import design_nu_enum, estimate_num_signals
from .wishart import (
    BACKENDS,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    WishartSpec,
    sample_u,
    u_model,
)

PRESETS = {
    "fig2": dict(problem="source-enum", q=4, p=8, n=1000, q_max=7,
                 snr_grid_db=tuple(range(-12, 19, 3)), penalty="aic"),
    "fig6": dict(problem="source-enum", q=4, p=8, n=1000, q_max=7,
                 snr_grid_db=tuple(range(-12, 19, 3)), penalty="gic:2.281"),
    "fig7": dict(problem="sinusoids", q=3, n=1000, q_max=6,
                 snr_grid_db=tuple(range(-21, 1, 3)), penalty="aic"),
    "fig10": dict(problem="sinusoids", q=3, n=1000, q_max=6,
                  snr_grid_db=tuple(range(-21, 1, 3)), penalty="gic:2.499"),
}


class DataFormatError(Exception):
    """Malformed or dimensionally inconsistent input data file."""


def _manifest(command: str, params: dict, seed=None) -> dict:
    out = {
        "command": command,
        "params": params,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if seed is not None:
        out["seed"] = seed
    return out


def _emit_json(obj: dict) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# design
# ---------------------------------------------------------------------------


def cmd_design(args) -> int:
    if args.target == "source-enum":
        params = dict(p=args.p, n=args.n, q_max=args.qmax, pover_max=args.pover_max,
                      backend=args.backend, mc_trials=args.mc_trials)
        result = design_nu_enum(args.p, args.n, args.qmax, args.pover_max,
                                backend=args.backend, trials=args.mc_trials,
                                seed=args.seed)
        payload = {
            "nu": result.nu,
            "q_star": result.q_star,
            "v_threshold": result.v_threshold,
            "predicted_pover": result.predicted_pover,
            "backend": result.backend,
            "manifest": _manifest("design source-enum", params, args.seed),
        }
    else:
        params = dict(n=args.n, pover_max=args.pover_max, i_max=args.imax)
        result = design_nu_glm(args.n, args.pover_max, args.imax)
        payload = {
            "nu": result.nu,
            "i_max": result.i_max,
            "predicted_pover": result.predicted_pover_ub,
            "manifest": _manifest("design glm", params),
        }
    _emit_json(payload)
    return 0


# ---------------------------------------------------------------------------
# select
# ---------------------------------------------------------------------------


def _read_csv_columns(path: str) -> tuple[list[str], np.ndarray]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataFormatError(f"{path}: empty file") from None
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise DataFormatError(
                        f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                    )
                try:
                    rows.append([float(v) for v in row])
                except ValueError:
                    raise DataFormatError(f"{path}:{lineno}: non-numeric value") from None
    except OSError as e:
        raise DataFormatError(f"cannot read {path}: {e}") from None
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return [h.strip() for h in header], np.asarray(rows)


def _load_sensor_batch(path: str) -> np.ndarray:
    header, data = _read_csv_columns(path)
    if len(header) % 2 or len(header) < 4:
        raise DataFormatError(f"{path}: need an even number (>= 4) of re_i/im_i columns")
    p = len(header) // 2
    expected = [f"{part}_{i}" for i in range(p) for part in ("re", "im")]
    if header != expected:
        raise DataFormatError(
            f"{path}: header must be {','.join(expected)} for p={p}, got {','.join(header)}"
        )
    cplx = data[:, 0::2] + 1j * data[:, 1::2]         # rows are time samples
    return cplx.T                                     # (p, n)


def _load_observation(path: str) -> np.ndarray:
    header, data = _read_csv_columns(path)
    if header != ["re", "im"]:
        raise DataFormatError(f"{path}: header must be re,im, got {','.join(header)}")
    return data[:, 0] + 1j * data[:, 1]


def cmd_select(args) -> int:
    rule = PenaltyRule.from_string(args.penalty)
    if args.target == "source-enum":
        y = _load_sensor_batch(args.input)
        p, n = y.shape
        if n < p:
            raise DataFormatError(f"{args.input}: only {n} samples for p={p} sensors")
        if not 1 <= args.qmax <= p - 1:
            raise ValueError(f"--qmax must be in [1, {p - 1}] for p={p}")
        result = estimate_num_signals(y, rule, args.qmax)
        params = dict(input=args.input, penalty=rule.label(), q_max=args.qmax, p=p, n=n)
    else:
        y = _load_observation(args.input)
        n = y.size
        try:
            scenario = build_sinusoid_scenario(args.qmax, n)
        except ValueError as e:
            raise DataFormatError(f"{args.input}: {e}") from None
        result = estimate_order_glm(y, scenario, rule)
        params = dict(input=args.input, penalty=rule.label(), q_max=args.qmax, n=n)
    payload = {
        "selected": result.selected,
        "nu": result.nu,
        "table": result.table(),
        "manifest": _manifest(f"select {args.target}", params),
    }
    _emit_json(payload)
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    base = dict(PRESETS[args.preset]) if args.preset else {}
    merged = {
        "problem": args.problem or base.get("problem"),
        "q": args.q if args.q is not None else base.get("q"),
        "p": args.p if args.p is not None else base.get("p"),
        "n": args.n if args.n is not None else base.get("n"),
        "q_max": args.qmax if args.qmax is not None else base.get("q_max"),
        "penalty": args.penalty or base.get("penalty"),
        "snr_grid_db": tuple(args.snr) if args.snr else base.get("snr_grid_db"),
    }
    missing = [k for k, v in merged.items() if v is None and k != "p"]
    if missing:
        raise ValueError(f"missing required simulate options: {', '.join(missing)}")
    rule = PenaltyRule.from_string(merged["penalty"])
    cfg = SweepConfig(
        problem=merged["problem"],
        q=merged["q"],
        n=merged["n"],
        q_max=merged["q_max"],
        rule=rule,
        snr_grid_db=merged["snr_grid_db"],
        trials=args.trials,
        seed=args.seed,
        p=merged["p"],
        amplitudes=tuple(args.amplitudes) if args.amplitudes else None,
        phases=tuple(args.phases) if args.phases else None,
    )
    cfg.validate()
    overlay = None
    analytics = None
    if args.overlay:
        analytics = overlay_analytics(cfg)
        overlay = analytics.get("pover_highsnr", analytics.get("pover_ub"))
    records = run_sweep(cfg)
    params = dict(
        problem=cfg.problem, q=cfg.q, p=cfg.p, n=cfg.n, q_max=cfg.q_max,
        penalty=rule.label(), snr_grid_db=list(cfg.snr_grid_db), trials=cfg.trials,
        preset=args.preset,
    )
    max_hw = max(max(r.hw_under, r.hw_c, r.hw_over) for r in records)
    manifest = _manifest("simulate", params, cfg.seed)
    manifest["max_halfwidth_95"] = max_hw
    manifest["wide_ci"] = bool(max_hw > 0.05)
    if analytics is not None:
        manifest["overlay"] = analytics
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            write_sweep_csv(records, fh, overlay)
        _emit_json({"manifest": manifest, "output": args.output})
    else:
        write_sweep_csv(records, sys.stdout, overlay)
        json.dump({"manifest": manifest}, sys.stderr, indent=2, sort_keys=True)
        sys.stderr.write("\n")
    return 0


# ---------------------------------------------------------------------------
# ustat
# ---------------------------------------------------------------------------


def cmd_ustat(args) -> int:
    spec = WishartSpec(args.p_prime, args.n)
    model = u_model(spec, backend=args.backend, trials=args.mc_trials, seed=args.seed)
    lo = 1.0 / args.p_prime
    # pad slightly below the support edge so the first point shows the floor
    pad = 0.02 * (1.0 - lo)
    grid = np.linspace(max(lo - pad, 0.0), 1.0, args.grid_points)
    approx = [model.cdf(float(x)) for x in grid]
    empirical = None
    if args.empirical_trials:
        draws = np.sort(sample_u(spec, args.empirical_trials, args.seed))
        empirical = np.searchsorted(draws, grid, side="right") / draws.size
    header = "x,cdf_approx" + (",cdf_empirical" if empirical is not None else "")
    sys.stdout.write(header + "\n")
    for i, x in enumerate(grid):
        cells = [f"{x:.6g}", f"{approx[i]:.6g}"]
        if empirical is not None:
            cells.append(f"{empirical[i]:.6g}")
        sys.stdout.write(",".join(cells) + "\n")
    params = dict(p_prime=args.p_prime, n=args.n, backend=args.backend,
                  grid_points=args.grid_points, mc_trials=args.mc_trials,
                  empirical_trials=args.empirical_trials)
    json.dump({"manifest": _manifest("ustat", params, args.seed)}, sys.stderr,
              indent=2, sort_keys=True)
    sys.stderr.write("\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gicdesign",
        description="Penalty design and model-order selection for GIC-family criteria.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="design a penalty weight")
    dsub = p_design.add_subparsers(dest="target", required=True)

    d_enum = dsub.add_parser("source-enum", help="source enumeration designer")
    d_enum.add_argument("--p", type=int, required=True, help="number of sensors")
    d_enum.add_argument("--n", type=int, required=True, help="number of snapshots")
    d_enum.add_argument("--qmax", type=int, required=True, help="largest true order guarded")
    d_enum.add_argument("--pover-max", type=float, required=True,
                        help="target high-SNR overestimation probability")
    d_enum.add_argument("--backend", choices=BACKENDS, default="mc")
    d_enum.add_argument("--mc-trials", type=int, default=DEFAULT_TRIALS)
    d_enum.add_argument("--seed", type=int, default=DEFAULT_SEED)
    d_enum.set_defaults(func=cmd_design)

    d_glm = dsub.add_parser("glm", help="linear-model designer")
    d_glm.add_argument("--n", type=int, required=True, help="observation length")
    d_glm.add_argument("--pover-max", type=float, required=True,
                       help="target overestimation bound")
    d_glm.add_argument("--imax", type=int, default=2, help="union bound truncation")
    d_glm.set_defaults(func=cmd_design)

    p_select = sub.add_parser("select", help="select a model order from a CSV file")
    ssub = p_select.add_subparsers(dest="target", required=True)
    for name in ("source-enum", "sinusoids"):
        sp = ssub.add_parser(name)
        sp.add_argument("--input", required=True, help="input CSV path")
        sp.add_argument("--penalty", required=True, help="aic | bic | gic:<nu>")
        sp.add_argument("--qmax", type=int, required=True)
        sp.set_defaults(func=cmd_select)

    p_sim = sub.add_parser("simulate", help="run an SNR sweep")
    p_sim.add_argument("--preset", choices=sorted(PRESETS), help="load a bundled scenario")
    p_sim.add_argument("--problem", choices=["source-enum", "sinusoids"])
    p_sim.add_argument("--q", type=int, help="true order")
    p_sim.add_argument("--p", type=int, help="sensors (source-enum)")
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--qmax", type=int, dest="qmax")
    p_sim.add_argument("--penalty", help="aic | bic | gic:<nu>")
    p_sim.add_argument("--snr", type=float, nargs="+",
                       help="SNR grid in dB (space separated)")
    p_sim.add_argument("--trials", type=int, default=DEFAULT_SWEEP_TRIALS)
    p_sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sim.add_argument("--amplitudes", type=float, nargs="+",
                       help="relative amplitudes (space separated)")
    p_sim.add_argument("--phases", type=float, nargs="+",
                       help="phases in rad (space separated)")
    p_sim.add_argument("--overlay", action="store_true",
                       help="append the analytic overestimation column")
    p_sim.add_argument("--output", help="write CSV here instead of stdout")
    p_sim.set_defaults(func=cmd_simulate)

    p_u = sub.add_parser("ustat", help="dump the u = l1/t CDF approximation")
    p_u.add_argument("--p-prime", type=int, required=True, dest="p_prime")
    p_u.add_argument("--n", type=int, required=True)
    p_u.add_argument("--backend", choices=BACKENDS, default="mc")
    p_u.add_argument("--grid-points", type=int, default=101, dest="grid_points")
    p_u.add_argument("--empirical-trials", type=int, default=0, dest="empirical_trials")
    p_u.add_argument("--mc-trials", type=int, default=DEFAULT_TRIALS)
    p_u.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_u.set_defaults(func=cmd_ustat)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
