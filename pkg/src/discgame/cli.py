"""Command-line front end: file-based embedding, simulation and analysis.

Exit codes: 0 success, 1 input/parse error, 2 numerical failure (the
message names the failing error type).  All emitted files round-trip
through the matching readers bit-exactly.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import analysis, closedform, dynamics, embedding, games
from . import payout as payout_mod
from . import serialize
from .errors import DegeneratePoints, DiscGameError
from .hamiltonian import (
    MetaSystem,
    ParticleCloud,
    ReplicatorSystem,
    system_from_json,
)


def _parse_theta(text, r):
    if text is None:
        return np.zeros(r)
    values = np.array([float(v) for v in text.split(",")])
    if values.size != r:
        raise ValueError(f"theta0 has {values.size} entries, system needs {r}")
    return values


def _report_for(emb):
    sup = emb.in_support
    cloud = ParticleCloud(emb.coords[sup], emb.weights[sup])
    sys_ = ReplicatorSystem(cloud)
    try:
        interior = analysis.origin_in_hull_interior(emb.coords[sup])
    except DegeneratePoints:
        interior = False
    theta_star = analysis.find_equilibrium(sys_) if interior else None
    freqs = (analysis.linearization_frequencies(sys_, theta_star).tolist()
             if theta_star is not None else [])
    return {
        "rank": emb.rank,
        "shares": emb.shares,
        "origin_interior": interior,
        "equilibrium": theta_star.tolist() if theta_star is not None else None,
        "frequencies": freqs,
    }


def _cmd_embed(args):
    pm = payout_mod.read_payout_csv(args.input, weights_path=args.weights,
                                    auto_symmetrize=args.auto_symmetrize)
    emb = embedding.embed(pm, rank_tol=args.rank_tol)
    if args.rank:
        emb = embedding.truncate(emb, args.rank)
    embedding.to_json(emb, args.out)
    serialize.dump(_report_for(emb), args.out + ".report.json")
    print(f"wrote {args.out} (rank {emb.rank}) and {args.out}.report.json")
    return 0


def _cmd_analyze(args):
    emb = embedding.from_json(args.input)
    serialize.dump(_report_for(emb), args.out)
    print(f"wrote {args.out}")
    return 0


def _build_system(args):
    sys_ = system_from_json(args.input)
    if args.growth != sys_.growth.name or args.rate_mode != sys_.rate_mode:
        sys_ = ReplicatorSystem(sys_.base, growth=args.growth,
                                rate_mode=args.rate_mode)
    return sys_


def _cmd_simulate(args):
    sys_ = _build_system(args)
    theta0 = _parse_theta(args.theta0, sys_.r)
    traj = dynamics.integrate(sys_, theta0, args.t_max, args.dt,
                              record_every=args.record_every)
    traj.to_csv(args.out)
    tag = " (divergent)" if traj.divergent else ""
    print(f"wrote {args.out}: {len(traj.times)} samples{tag}")
    return 0


def _cmd_simulate_meta(args):
    doc = serialize.load(args.input)
    patches = [system_from_json(json.dumps(p)) for p in doc["patches"]]
    meta = MetaSystem(patches, np.asarray(doc["mixing"], dtype=float))
    theta0 = _parse_theta(args.theta0, meta.l * meta.r)
    traj = dynamics.integrate_meta(meta, theta0, args.t_max, args.dt,
                                   record_every=args.record_every)
    traj.to_csv(args.out)
    print(f"wrote {args.out}: {len(traj.times)} samples")
    return 0


def _cmd_direct(args):
    pm = payout_mod.read_payout_csv(args.input, auto_symmetrize=args.auto_symmetrize)
    if args.weights:
        w0 = np.loadtxt(args.weights, delimiter=",", ndmin=1)
    else:
        w0 = np.full(pm.n, 1.0 / pm.n)
    traj = dynamics.direct_replicator(pm, w0, growth=args.growth, dt=args.dt,
                                      t_max=args.t_max,
                                      record_every=args.record_every)
    traj.to_csv(args.out)
    print(f"wrote {args.out}: {len(traj.times)} samples")
    return 0


def _cmd_closedform(args):
    name = args.name
    ts = np.arange(1, int(round(args.t_max / args.dt)) + 1) * args.dt
    if name == "self-play":
        rows = [(t, *closedform.self_play((1.0, 0.0), t)) for t in ts]
        header = ["t", "y_1", "y_2"]
    elif name == "fictitious":
        rows = [(t, *closedform.fictitious_self_play(t)) for t in ts]
        header = ["t", "y_1", "y_2"]
    elif name == "sga":
        starts = np.column_stack([np.cos(2 * np.pi * np.arange(args.n) / args.n) + 0.5,
                                  np.sin(2 * np.pi * np.arange(args.n) / args.n)])
        rows = [(t, *closedform.sga_epicycles(starts, t).ravel()) for t in ts]
        header = ["t"] + [f"y_{j + 1}" for j in range(2 * args.n)]
    elif name == "transitive":
        ratings = np.linspace(-1.0, 1.0, args.n)
        w0 = np.full(args.n, 1.0 / args.n)
        rows = [(t, *closedform.transitive_density(ratings, w0, 1.0, t)) for t in ts]
        header = ["t"] + [f"w_{j + 1}" for j in range(args.n)]
    elif name == "laplace":
        total = closedform.laplace_population(args.a)
        rows = [(t, *closedform.laplace_oscillator(args.a, total, t)) for t in ts]
        header = ["t", "theta_1", "theta_2"]
    elif name == "gaussian":
        rows = []
        for t in ts:
            xbar, sigma = closedform.gaussian_quadratic(
                [1.0], [[1.0]], [0.0], [[-1.0]], [[0.0]], t, n_steps=200)
            rows.append((t, xbar[0], sigma[0, 0]))
        header = ["t", "xbar", "sigma"]
    else:
        raise ValueError(f"unknown closed form {name!r}")
    serialize.write_csv(args.out, header, rows)
    print(f"wrote {args.out}: {len(rows)} samples of {name}")
    return 0


def _cmd_ipd_gen(args):
    config = games.IpdConfig(replicates=args.replicates)
    agents, pm = games.ipd_population(args.n, seed=args.seed, config=config)
    games.write_agents_csv(agents, args.out + ".agents.csv")
    payout_mod.write_payout_csv(pm, args.out, weights_path=args.out + ".weights.csv")
    print(f"wrote {args.out}, {args.out}.agents.csv, {args.out}.weights.csv")
    return 0


def _time_per_step(fn, n_steps, repeats: int = 3):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(n_steps)
        best = min(best, time.perf_counter() - start)
    return best / n_steps


def bench_table(trait_dims=(3, 30), direct_sizes=(200, 800, 1600),
                particles: int = 400, steps: int = 300, seed: int = 0):
    """Per-step cost of latent stepping vs trait dimension, and of dense
    replicator stepping vs population size.

    The latent column is flat in the trait dimension because stepping sees
    only the fixed-rank coordinates; the dense column grows ~ n².
    """
    rows = []
    rng = np.random.default_rng(seed)
    for dim in trait_dims:
        traits = rng.standard_normal((particles, dim))
        proj = rng.standard_normal((dim, 2)) / np.sqrt(dim)
        latent = traits @ proj / np.sqrt(particles)  # keeps frequencies O(1)
        entries = latent[:, [0]] @ latent[:, [1]].T - latent[:, [1]] @ latent[:, [0]].T
        pm = payout_mod.PayoutMatrix(particles * entries)
        emb = embedding.embed(pm)
        cloud = ParticleCloud(emb.coords, np.full(particles, 1.0 / particles))
        sys_ = ReplicatorSystem(cloud, rate_mode="constant")

        def run(k, sys_=sys_):
            theta = np.array([0.2, 0.0])
            for _ in range(k):
                theta = dynamics.step_implicit_midpoint(sys_, theta, 0.01)

        run(10)  # warm up
        rows.append(("latent", dim, emb.rank, particles,
                     _time_per_step(run, steps)))
    for n in direct_sizes:
        pm = games.make_random_lowrank(n, 2, seed=seed)
        w0 = np.full(n, 1.0 / n)

        def run(k, pm=pm, w0=w0):
            dynamics.direct_replicator(pm, w0, dt=0.01, t_max=0.01 * k,
                                       record_every=k)

        run(10)
        rows.append(("direct", n, 2, n, _time_per_step(run, steps)))
    return rows


def _cmd_bench(args):
    rows = bench_table(seed=args.seed)
    with open(args.out, "w") as fh:
        fh.write("mode,size,rank,particles,sec_per_step\n")
        for mode, size, rank, particles, sec in rows:
            fh.write(f"{mode},{size},{rank},{particles},{serialize.fmt(sec)}\n")
    for mode, size, rank, particles, sec in rows:
        print(f"{mode:7s} size={size:4d} rank={rank} particles={particles:4d} "
              f"sec/step={sec:.3e}")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discgame",
        description="Embed zero-sum payouts into planar coordinates and "
                    "simulate replicator dynamics in the latent space.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, input_required=True):
        p.add_argument("--input", required=input_required)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("embed", help="payout CSV -> embedding JSON + report")
    common(p)
    p.add_argument("--weights", default=None)
    p.add_argument("--rank", type=int, default=0, help="truncate to this rank")
    p.add_argument("--rank-tol", type=float, default=1e-10)
    p.add_argument("--auto-symmetrize", action="store_true")
    p.set_defaults(fn=_cmd_embed)

    p = sub.add_parser("analyze", help="embedding JSON -> analysis report")
    common(p)
    p.set_defaults(fn=_cmd_analyze)

    for name, fn in (("simulate", _cmd_simulate),
                     ("simulate-meta", _cmd_simulate_meta)):
        p = sub.add_parser(name, help=f"{name}: system JSON -> trajectory CSV")
        common(p)
        p.add_argument("--theta0", default=None,
                       help="comma-separated initial parameters (default zeros)")
        p.add_argument("--dt", type=float, default=0.01)
        p.add_argument("--t-max", type=float, default=50.0)
        p.add_argument("--record-every", type=int, default=1)
        p.add_argument("--growth", choices=("linear", "saturating", "allee"),
                       default="linear")
        p.add_argument("--rate-mode", choices=("linear", "constant"),
                       default="constant")
        p.set_defaults(fn=fn)

    p = sub.add_parser("direct", help="payout CSV -> dense weight trajectory CSV")
    common(p)
    p.add_argument("--weights", default=None, help="initial weights CSV")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--growth", choices=("linear", "saturating", "allee"),
                   default="linear")
    p.add_argument("--auto-symmetrize", action="store_true")
    p.set_defaults(fn=_cmd_direct)

    p = sub.add_parser("closedform", help="sample a closed-form curve to CSV")
    p.add_argument("name", choices=("self-play", "fictitious", "sga",
                                    "transitive", "laplace", "gaussian"))
    p.add_argument("--out", required=True)
    p.add_argument("--a", type=float, default=0.6)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=10.0)
    p.set_defaults(fn=_cmd_closedform)

    p = sub.add_parser("ipd-gen", help="sample agents and their payout matrix")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=int, default=200)
    p.set_defaults(fn=_cmd_ipd_gen)

    p = sub.add_parser("bench", help="per-step cost table (latent vs dense)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except DiscGameError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
