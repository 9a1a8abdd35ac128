"""Command-line front end: ``solve``, ``bid`` and ``experiment``.

Exit codes: 0 success, 1 usage or config error, 2 infeasible instance,
3 bidding did not converge where convergence was required.
"""
import argparse
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from . import scenarios
from .bidding import PRICE_TAKER, STRATEGIC, AsyncSchedule, BiddingConfig, run_bidding
from .equilibrium import solve_gne_direct, solve_self_sufficiency_all, solve_social_optimum
from .exceptions import AssumptionError, InfeasibilityError, ParameterError, SharingError
from .formats import read_config, read_instance, write_table
from .metrics import outcome_report, poa_lower_bound

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NOT_CONVERGED = 0, 1, 2, 3

EXPERIMENTS = ("misreport", "poa_vs_size", "diversity", "delay", "sensitivity")
SOURCES = ("builtin", "file", "random")
MODES = {"strategic": STRATEGIC, "price-taker": PRICE_TAKER, "price_taker": PRICE_TAKER}

# instance used by the sensitivity experiment when none is configured
SENSITIVITY_DEFAULT = dict(I=50, seed=2)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    scenario: Optional[str] = None
    source: str = "builtin"
    instance_file: Optional[str] = None
    I: Optional[int] = None
    seed: int = 0
    a: float = 100.0
    epsilon: float = 1e-4
    max_iterations: int = 500
    mode: str = STRATEGIC
    schedule: str = "sync"
    miss_probability: float = 0.8
    max_delay: int = 3
    out: str = "."
    formats: tuple = ("csv",)
    source_given: bool = False
    extra: Dict[str, str] = field(default_factory=dict)

    def validate(self):
        if self.source not in SOURCES:
            raise UsageError(f"instance source must be one of {SOURCES}, got {self.source!r}")
        if self.source == "file":
            if not self.instance_file:
                raise UsageError("instance = file needs instance_file")
            if not Path(self.instance_file).is_file():
                raise UsageError(f"instance file not found: {self.instance_file}")
        elif self.instance_file:
            raise UsageError(f"instance_file given but instance source is {self.source!r}")
        if self.source == "random" and (self.I is None or self.I < 2):
            raise UsageError("instance = random needs I >= 2")
        if self.schedule not in ("sync", "async"):
            raise UsageError(f"schedule must be sync or async, got {self.schedule!r}")
        if set(self.formats) - {"csv"}:
            raise UsageError(f"unsupported output formats {sorted(set(self.formats) - {'csv'})}")
        return self

    def bidding(self):
        sched = None
        if self.schedule == "async":
            sched = AsyncSchedule(self.miss_probability, self.max_delay, self.seed)
        return BiddingConfig(self.epsilon, self.max_iterations, self.mode, sched)

    def instance(self):
        if self.source == "file":
            return read_instance(self.instance_file, self.a)
        if self.source == "random":
            return scenarios.random_instance(self.I, self.a, self.seed)
        return scenarios.builtin_three_prosumer(self.a)


_CASTS = dict(I=int, i=int, n=int, seed=int, a=float, epsilon=float, max_iter=int,
              miss_prob=float,
              max_delay=int)


def _from_mapping(values, cfg):
    values = dict(values)
    renames = dict(max_iter="max_iterations", miss_prob="miss_probability",
                   instance="source", n="I", i="I")
    for key, raw in list(values.items()):
        cast = _CASTS.get(key, str)
        try:
            val = cast(raw)
        except ValueError:
            raise UsageError(f"bad value for {key}: {raw!r}") from None
        name = renames.get(key, key)
        if name == "mode":
            if val not in MODES:
                raise UsageError(f"mode must be strategic or price-taker, got {val!r}")
            val = MODES[val]
        if name == "formats":
            val = tuple(s.strip() for s in val.split(",") if s.strip())
        if name in cfg.__dataclass_fields__ and name not in ("extra", "source_given"):
            cfg = replace(cfg, **{name: val})
            if name in ("source", "instance_file"):
                cfg.source_given = True
        else:
            cfg.extra[key] = raw
    if cfg.instance_file and "source" not in {renames.get(k, k) for k in values}:
        cfg.source = "file"
    return cfg


def build_config(args):
    cfg = RunConfig(extra={})
    if args.config:
        try:
            cfg = _from_mapping(read_config(args.config), cfg)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {args.config}") from None
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
        if cfg.instance_file and not Path(cfg.instance_file).is_absolute():
            cfg.instance_file = str(Path(args.config).parent / cfg.instance_file)
    flags = dict(seed=args.seed, a=args.a, epsilon=args.epsilon, max_iter=args.max_iter,
                 mode=args.mode, schedule=args.schedule, miss_prob=args.miss_prob,
                 max_delay=args.max_delay, out=args.out)
    if getattr(args, "tag", None):
        flags["scenario"] = args.tag
    cfg = _from_mapping({k: v for k, v in flags.items() if v is not None}, cfg)
    return cfg.validate()


def _extra_list(cfg, key, cast, default):
    raw = cfg.extra.get(key)
    if raw is None:
        return list(default)
    try:
        return [cast(s) for s in raw.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"bad list for {key}: {raw!r}") from None


def _extra(cfg, key, cast, default):
    raw = cfg.extra.get(key)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None


def cmd_solve(cfg):
    inst = cfg.instance()
    social = solve_social_optimum(inst)
    gne = solve_gne_direct(inst)
    selfs = solve_self_sufficiency_all(inst)
    rep = outcome_report(inst, gne, social, selfs)
    out = Path(cfg.out)
    header = ["prosumer", "p_social", "d_social", "cost_social", "p_gne", "d_gne",
              "cost_gne", "payoff_gne", "payment_gne", "p_self", "d_self", "cost_self",
              "pareto_ok"]
    rows = []
    for i, pr in enumerate(inst.prosumers):
        rows.append([pr.id, social.p[i], social.d[i], rep.social_costs[i], gne.p[i], gne.d[i],
                     rep.gne_costs[i], rep.payoffs[i], rep.payments[i], selfs.p[i],
                     selfs.d[i], rep.self_costs[i], bool(rep.pareto[i])])
    rows.append(["total", float(np.sum(social.p)), float(np.sum(social.d)), rep.total_social,
                 float(np.sum(gne.p)), float(np.sum(gne.d)), rep.total_gne,
                 float(np.sum(rep.payoffs)), float(np.sum(rep.payments)),
                 float(np.sum(selfs.p)), float(np.sum(selfs.d)), rep.total_self,
                 bool(np.all(rep.pareto))])
    write_table(out / "solution.csv", header, rows)

    summary = [("I", inst.I), ("a", float(inst.a)), ("social_price", social.price),
               ("sharing_price", gne.price), ("sharing_dual", gne.dual),
               ("price_gap", rep.price_gap), ("total_self", rep.total_self),
               ("total_social", rep.total_social), ("total_gne", rep.total_gne),
               ("poa", rep.poa), ("poa_gap", rep.poa_gap),
               ("poa_gap_relative", rep.poa_gap / abs(rep.total_social)),
               ("pareto_all", bool(np.all(rep.pareto))),
               ("kkt_social", social.kkt_residual), ("kkt_gne", gne.kkt_residual)]
    try:
        bound = poa_lower_bound(inst, selfs)
        summary += [("poa_bound", bound.bound), ("poa_constant", bound.C)]
    except AssumptionError:
        summary += [("poa_bound", None), ("poa_constant", None)]
    write_table(out / "summary.csv", ["key", "value"], summary)
    return EXIT_OK


def write_trace(path, inst, sol, trace):
    ids = [pr.id for pr in inst.prosumers]
    header = (["k", "lambda"] + [f"p_{i}" for i in ids] + [f"d_{i}" for i in ids]
              + [f"b_{i}" for i in ids] + [f"updated_{i}" for i in ids] + ["termination"])
    blank = [None] * len(ids)
    rows = [[0, trace.prices[0]] + blank * 4 + [None]]
    for k in range(trace.iterations):
        rows.append([k + 1, trace.prices[k + 1]] + list(trace.p[k]) + list(trace.d[k])
                    + list(trace.bids[k]) + [bool(u) for u in trace.updated[k]] + [None])
    rows.append(["final", sol.price] + list(sol.p) + list(sol.d) + list(sol.b) + blank
                + [trace.termination])
    write_table(path, header, rows)


def cmd_bid(cfg):
    inst = cfg.instance()
    sol, trace = run_bidding(inst, cfg.bidding())
    write_trace(Path(cfg.out) / "trace.csv", inst, sol, trace)
    if not trace.converged:
        print(f"bidding did not converge: {trace.termination} after "
              f"{trace.iterations} rounds", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _exp_misreport(cfg, out):
    inst = cfg.instance()
    idx = _extra(cfg, "prosumer", int, 1) - 1
    n = _extra(cfg, "n_scales", int, 41)
    lo, hi = _extra(cfg, "scale_min", float, 0.8), _extra(cfg, "scale_max", float, 1.2)
    if not 0 <= idx < inst.I:
        raise UsageError(f"prosumer must lie in 1..{inst.I}")
    ids = [pr.id for pr in inst.prosumers]
    rows = []
    for regime in ("sharing", "centralized"):
        rep = scenarios.misreport_sweep(inst, idx, np.linspace(lo, hi, n), regime)
        for r in rep.records:
            rows.append([regime, r["scale"], r["price"]] + r["net_utility"]
                        + [r["total_net_utility"]])
    write_table(out / "misreport.csv", ["regime", "scale", "price"]
                + [f"net_utility_{i}" for i in ids] + ["total_net_utility"], rows)


def _exp_poa(cfg, out):
    lo, hi = _extra(cfg, "i_min", int, 2), _extra(cfg, "i_max", int, 50)
    n_seeds = _extra(cfg, "n_seeds", int, 5)
    seeds = range(cfg.seed, cfg.seed + n_seeds)
    rep = scenarios.poa_vs_size(range(lo, hi + 1), cfg.a, seeds)
    write_table(out / "poa_vs_size.csv",
                ["seed", "I", "poa", "poa_bound", "C", "social_cost", "gne_cost"],
                [[r["seed"], r["I"], r["poa"], r["poa_bound"], r["C"], r["social_cost"],
                  r["gne_cost"]] for r in rep.records])


def _exp_diversity(cfg, out):
    I = _extra(cfg, "population", int, 100)
    types = _extra_list(cfg, "types", int, (1, 2, 4, 5, 10, 20, 50, 100))
    n_draws = _extra(cfg, "n_draws", int, 50)
    rep = scenarios.diversity_experiment(I, types, n_draws, cfg.a, cfg.seed)
    write_table(out / "diversity.csv", ["types", "mean_saving", "var_saving"],
                [[r["types"], r["mean_saving"], r["var_saving"]] for r in rep.records])
    write_table(out / "diversity_draws.csv", ["types", "draw", "saving"],
                [[r["types"], j, s] for r in rep.records for j, s in enumerate(r["savings"])])


def _exp_delay(cfg, out):
    inst = cfg.instance()
    delays = _extra_list(cfg, "delays", int, (3, 6, 9))
    n_seeds = _extra(cfg, "n_seeds", int, 20)
    seeds = range(cfg.seed, cfg.seed + n_seeds)
    base = replace(cfg.bidding(), schedule=None)
    sync_sol, _ = run_bidding(inst, base)
    rep = scenarios.delay_experiment(inst, base, delays, seeds, cfg.miss_probability)
    write_table(out / "delay.csv",
                ["max_delay", "seed", "converged", "iterations", "price", "sync_price"],
                [[r["max_delay"], r["seed"], r["converged"], r["iterations"], r["price"],
                  sync_sol.price] for r in rep.records])
    write_table(out / "delay_prices.csv", ["max_delay", "seed", "k", "lambda"],
                [[r["max_delay"], r["seed"], k, lam] for r in rep.records
                 for k, lam in enumerate(r["prices"])])


def _exp_sensitivity(cfg, out):
    if cfg.source_given:
        inst = cfg.instance()
    else:
        inst = scenarios.random_instance(SENSITIVITY_DEFAULT["I"], cfg.a,
                                         SENSITIVITY_DEFAULT["seed"])
    a_values = _extra_list(cfg, "a_values", float, (25, 50, 75, 100, 125))
    rep = scenarios.sensitivity_sweep(inst, a_values, cfg.bidding())
    write_table(out / "sensitivity.csv",
                ["a", "converged", "termination", "iterations", "price", "a_min"],
                [[r["a"], r["converged"], r["termination"], r["iterations"], r["price"],
                  r["a_min"]] for r in rep.records])
    write_table(out / "sensitivity_prices.csv", ["a", "k", "lambda"],
                [[r["a"], k, lam] for r in rep.records for k, lam in enumerate(r["prices"])])


_EXPERIMENTS = dict(misreport=_exp_misreport, poa_vs_size=_exp_poa,
                    diversity=_exp_diversity, delay=_exp_delay,
                    sensitivity=_exp_sensitivity)


def cmd_experiment(cfg):
    if cfg.scenario not in _EXPERIMENTS:
        raise UsageError(f"experiment tag must be one of {EXPERIMENTS}, got {cfg.scenario!r}")
    _EXPERIMENTS[cfg.scenario](cfg, Path(cfg.out))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="prosumer-sharing",
                                     description="Prosumer energy sharing markets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--seed", type=int, help="random instance / schedule seed")
        p.add_argument("--a", type=float, help="market sensitivity")
        p.add_argument("--epsilon", type=float, help="bidding stop threshold on the price")
        p.add_argument("--max-iter", type=int, help="bidding round limit")
        p.add_argument("--mode", choices=["strategic", "price-taker"])
        p.add_argument("--schedule", choices=["sync", "async"])
        p.add_argument("--miss-prob", type=float, help="async skip probability")
        p.add_argument("--max-delay", type=int, help="async staleness cap")
        return p

    common(sub.add_parser("solve", help="social optimum, sharing equilibrium, self-sufficiency"))
    common(sub.add_parser("bid", help="run the bidding protocol and write its trace"))
    exp = common(sub.add_parser("experiment", help="run an experiment series"))
    exp.add_argument("tag", nargs="?", help="one of " + ", ".join(EXPERIMENTS))
    return parser


COMMANDS = dict(solve=cmd_solve, bid=cmd_bid, experiment=cmd_experiment)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibilityError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SharingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
