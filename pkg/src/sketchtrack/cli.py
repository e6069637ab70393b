"""Command line interface.

Subcommands:
  run     simulate one scenario and report per-mode tracking error
  batch   paired fused-vs-autonomous comparison across many seeds
  serve   live WebSocket tracking service
  verify  cross-check the filter math against independent oracles
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np
import yaml

from .errors import ConfigError
from .sim import (MODES, ScenarioConfig, reference_scenario, run_scenario,
                  write_outputs)

logger = logging.getLogger(__name__)

PRESETS = ("reference",)


def load_config(args) -> ScenarioConfig:
    if args.config:
        config = ScenarioConfig.from_yaml(args.config)
    else:
        config = reference_scenario()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "horizon", None) is not None:
        overrides["horizon"] = args.horizon
    if getattr(args, "modes", None):
        overrides["modes"] = tuple(args.modes.split(","))
    if overrides:
        config = ScenarioConfig.from_dict({**config.to_dict(), **overrides})
    return config


def cmd_run(args) -> int:
    config = load_config(args)
    started = time.perf_counter()
    result = run_scenario(config)
    elapsed = time.perf_counter() - started
    for mode in config.modes:
        trace = result.modes[mode]
        print(f"mode={mode:<10s} rmse={trace.rmse:.4f} "
              f"final_error={trace.records[-1].error:.4f}")
        for oid in sorted(trace.final_reliabilities):
            rel = trace.final_reliabilities[oid]
            print(f"  operator {oid}: alpha={rel.alpha:.3f} beta={rel.beta:.3f} "
                  f"mean={rel.mean:.3f}")
    if "autonomous" in result.modes and "fused" in result.modes:
        improved = result.modes["fused"].rmse < result.modes["autonomous"].rmse
        print(f"fused improves on autonomous: {'yes' if improved else 'no'}")
    print(f"elapsed: {elapsed:.2f}s")
    if args.out:
        write_outputs(result, args.out)
        print(f"wrote traces to {args.out}")
    return 0


def cmd_batch(args) -> int:
    config = load_config(args)
    if "autonomous" not in config.modes or "fused" not in config.modes:
        config = ScenarioConfig.from_dict({**config.to_dict(), "modes": list(MODES)})
    rows = []
    wins = 0
    for i in range(args.runs):
        seeded = ScenarioConfig.from_dict({**config.to_dict(), "seed": config.seed + i})
        result = run_scenario(seeded)
        auto = result.modes["autonomous"].rmse
        fused = result.modes["fused"].rmse
        win = fused < auto
        wins += win
        rows.append({"seed": seeded.seed, "rmse_autonomous": auto,
                     "rmse_fused": fused, "fused_wins": bool(win)})
        if not args.quiet:
            print(f"seed={seeded.seed:<6d} auto={auto:.4f} fused={fused:.4f} "
                  f"{'WIN' if win else 'loss'}")
    rate = wins / args.runs
    mean_auto = float(np.mean([r["rmse_autonomous"] for r in rows]))
    mean_fused = float(np.mean([r["rmse_fused"] for r in rows]))
    print(f"runs={args.runs} win_rate={rate:.2%} "
          f"mean_rmse auto={mean_auto:.4f} fused={mean_fused:.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            yaml.safe_dump({"runs": rows, "win_rate": rate,
                            "mean_rmse_autonomous": mean_auto,
                            "mean_rmse_fused": mean_fused}, fh, sort_keys=False)
        print(f"wrote batch results to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    config = load_config(args)
    app = create_app(config, speed=args.realtime_factor)
    print(f"serving ws://{args.host}:{args.port}/ws "
          f"(grid {config.rows}x{config.cols}, {len(config.sensors)} sensors)")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_verify(args) -> int:
    from . import oracles
    from .grid import Bounds, build_grid
    from .human import ReliabilityState, marginal_log_values
    from .learning import (exact_mixture_moments, fit_beta_from_moments,
                           paper_moments, posterior_mixture)
    from .motion import build_kernel, predict
    from .tracker import Belief, _fuse_log

    failures = 0

    def report(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        print(f"[{status}] {name}" + (f" ({detail})" if detail else ""))

    # 1. Marginalized sketch likelihood: closed form vs numerical quadrature.
    worst = 0.0
    for alpha, beta in ((2.0, 2.0), (0.7, 3.1), (5.5, 1.2)):
        for w_h, m in ((0.2, 1), (1.0, 4), (0.35, 30)):
            rel = ReliabilityState(alpha=alpha, beta=beta)
            for inside in (True, False):
                log_in, log_out = marginal_log_values(rel, w_h, m)
                ours = np.exp(log_in if inside else log_out)
                ref = oracles.quadrature_marginal(alpha, beta, w_h, m, inside)
                worst = max(worst, abs(ours - ref) / ref)
    report("sketch marginal vs quadrature", worst < 1e-6, f"max rel err {worst:.2e}")

    # 2. Filter recursion vs explicit path enumeration on a tiny grid.
    rng = np.random.default_rng(7)
    grid = build_grid(Bounds(0, 0, 2, 2), 3, 3)
    kernel = build_kernel(grid, (0.3, 0.1), 0.8, 0.5)
    dense = kernel.matrix.toarray()
    initial = rng.random(9)
    initial /= initial.sum()
    belief = Belief(weights=initial)
    likes = []
    for _ in range(3):
        vec = rng.random(9) + 0.05
        likes.append(vec)
        pred = predict(belief.weights, kernel)
        post = pred * vec
        belief = Belief(weights=post / post.sum())
    ref = oracles.brute_force_posterior(initial, dense, likes)
    err = float(np.max(np.abs(belief.weights - ref)))
    report("filter vs path enumeration", err < 1e-10, f"max abs err {err:.2e}")

    # 3. Weightless collapse and moment round trip.
    rel = ReliabilityState(alpha=1.7, beta=2.4)
    log_in, log_out = marginal_log_values(rel, 0.0, 5)
    collapse_ok = log_in == 0.0 and log_out == 0.0
    mix = posterior_mixture(rel, 0.6, 8, q_s=0.7)
    mean, var = exact_mixture_moments(mix)
    a, b = fit_beta_from_moments(mean, var)
    m2 = a / (a + b)
    v2 = a * b / ((a + b) ** 2 * (a + b + 1.0))
    round_ok = abs(m2 - mean) < 1e-9 and abs(v2 - var) < 1e-9
    report("weightless collapse + moment round trip", collapse_ok and round_ok)

    # 4. Mixture mean is the q_s-weighted component mean.
    worst = 0.0
    rng = np.random.default_rng(11)
    for _ in range(200):
        rel = ReliabilityState(alpha=float(rng.uniform(0.2, 8)),
                               beta=float(rng.uniform(0.2, 8)))
        mix = posterior_mixture(rel, float(rng.uniform(0, 2)),
                                int(rng.integers(1, 40)), q_s=float(rng.random()))
        mean, _ = paper_moments(mix)
        direct = (mix.q_s * mix.alpha_in / (mix.alpha_in + mix.beta_in)
                  + (1.0 - mix.q_s) * mix.alpha_out / (mix.alpha_out + mix.beta_out))
        worst = max(worst, abs(mean - direct))
    report("mixture mean identity", worst < 1e-12, f"max abs err {worst:.2e}")

    # 5. Belief stays normalized through a reference run.
    from .sim import build_tracker, generate_observations
    from .tracker import ObservationBundle

    config = reference_scenario(seed=3, horizon=60)
    worst = 0.0
    truth, ranges, sketches = generate_observations(config)
    tracker = build_tracker(config, "fused")
    for t in range(1, config.horizon + 1):
        res = tracker.step(ObservationBundle(t=t, ranges=tuple(ranges[t - 1]),
                                             sketches=tuple(sketches[t - 1])))
        worst = max(worst, abs(float(res.belief.weights.sum()) - 1.0))
    report("belief normalization over reference run", worst <= 1e-12,
           f"max |sum-1| {worst:.2e}")

    # 6. Fusion order invariance (bit-identical) and per-source scale invariance.
    rng = np.random.default_rng(5)
    ok = True
    for _ in range(20):
        n = 50
        entries = [(sid, np.log(rng.random(n) + 1e-3) * w)
                   for sid, w in (("a", 0.4), ("b", 0.4), ("c", 0.2))]
        base = _fuse_log(entries, n)
        perm = _fuse_log(list(reversed(entries)), n)
        ok &= bool(np.array_equal(base, perm))
        scaled = [(sid, term + (np.log(1e3) if sid == "b" else 0.0))
                  for sid, term in entries]
        with np.errstate(over="ignore"):
            ref = base / base.sum()
            alt = _fuse_log(scaled, n)
            alt = alt / alt.sum()
        ok &= bool(np.max(np.abs(ref - alt)) < 1e-12)
    report("fusion permutation and scale invariance", ok)

    print(f"{'all checks passed' if failures == 0 else f'{failures} check(s) failed'}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketchtrack",
        description="Grid tracking with fused sensor ranges and human sketches.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p, with_modes: bool = True):
        p.add_argument("--config", help="scenario YAML file (default: built-in reference)")
        p.add_argument("--seed", type=int, default=None, help="override scenario seed")
        p.add_argument("--horizon", type=int, default=None, help="override tick count")
        if with_modes:
            p.add_argument("--modes", default=None,
                           help="comma-separated subset of: " + ",".join(MODES))

    p_run = sub.add_parser("run", help="simulate one scenario")
    add_config_args(p_run)
    p_run.add_argument("--out", help="directory for trace CSVs and metrics")
    p_run.set_defaults(func=cmd_run)

    p_batch = sub.add_parser("batch", help="paired comparison over many seeds")
    add_config_args(p_batch, with_modes=False)
    p_batch.add_argument("--runs", type=int, default=50, help="number of seeds")
    p_batch.add_argument("--out", help="YAML file for per-run results")
    p_batch.add_argument("--quiet", action="store_true", help="suppress per-run lines")
    p_batch.set_defaults(func=cmd_batch)

    p_serve = sub.add_parser("serve", help="live WebSocket service")
    add_config_args(p_serve, with_modes=False)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--realtime-factor", type=float, default=1.0,
                         help="ticks per wall-clock tick interval (higher is faster)")
    p_serve.set_defaults(func=cmd_serve)

    p_verify = sub.add_parser("verify", help="oracle cross-checks")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
