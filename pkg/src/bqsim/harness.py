"""Experiment runner, real-vs-ideal distinguisher, statistics and CLI.

The distinguisher estimates total-variation distance over the joint
classical observables of N real and N ideal trials, and always reports
the DKW-style confidence radius sqrt(ln(2/delta)/(2N)) at delta = 0.01
next to the estimate -- never a silent threshold.  A Monte-Carlo
distinguisher certifies per-scenario estimates only, not the worst-case
guarantee over all inputs; that gap is inherent.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import adversary, bounds, engine, entropy
from .bits import bits_to_int
from .bounds import SecurityParams
from .rng import default_seed, stream_rng

DKW_DELTA = 0.01


class InvariantViolation(RuntimeError):
    """A run produced something the model forbids (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    scenario: str
    params: SecurityParams
    trials: int = 1000
    seed: int = 0
    model: str = "refined"       # "legacy" drops the aux-input bound
    out: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")

    def resolved(self) -> dict:
        p = self.params
        return {"scenario": self.scenario, "trials": self.trials,
                "seed": self.seed, "model": self.model,
                "n": p.n, "ell": p.ell, "m": p.m, "beta": p.beta,
                "eps": p.eps, "q": p.q}


@dataclass
class DistinguishReport:
    tv: float
    radius: float
    trials: int
    real_cells: int
    ideal_cells: int
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"tv": self.tv, "radius": self.radius, "trials": self.trials,
                "real_cells": self.real_cells, "ideal_cells": self.ideal_cells,
                **self.extra}


def confidence_radius(n: int, delta: float = DKW_DELTA) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def tv_distance(hist_a: dict, hist_b: dict) -> float:
    na = sum(hist_a.values())
    nb = sum(hist_b.values())
    keys = set(hist_a) | set(hist_b)
    return 0.5 * sum(abs(hist_a.get(k, 0) / na - hist_b.get(k, 0) / nb)
                     for k in keys)


def uniformity_test(samples) -> dict:
    """Empirical TV from the uniform distribution over fixed-length strings."""
    samples = np.asarray(samples, dtype=np.uint8)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise ValueError("need a non-empty (N, length) sample array")
    n, length = samples.shape
    counts = np.bincount(
        samples.dot(1 << np.arange(length - 1, -1, -1)).astype(np.int64),
        minlength=2 ** length)
    tv = 0.5 * np.abs(counts / n - 2.0 ** -length).sum()
    return {"tv_from_uniform": float(tv), "radius": confidence_radius(n)}


# ---------------------------------------------------------------------------
# scenarios: each yields per-trial classical observables for both worlds

def _honest_rot_scenario(cfg: ExperimentConfig):
    p = cfg.params
    s0, s1, y, c = engine.honest_ot_batch(p, cfg.trials, cfg.seed)
    for i in range(cfg.trials):
        real = (bits_to_int(s0[i]), bits_to_int(s1[i]), int(c[i]),
                bits_to_int(y[i]))
        ideal_out = engine.run_ideal_rot(p.ell, stream_rng(cfg.seed, 10 ** 6 + i))
        (ix0, ix1), (ic, iy) = ideal_out["A"], ideal_out["B"]
        ideal = (bits_to_int(ix0), bits_to_int(ix1), ic, bits_to_int(iy))
        yield real, ideal


def _sender_corrupt_scenario(cfg: ExperimentConfig):
    p = cfg.params
    strat = adversary.SenderStrategy(kind="honest",
                                     classical_b=tuple(range(p.n)), ell=p.ell)
    for i in range(cfg.trials):
        rng_r = stream_rng(cfg.seed, 2 * i)
        rng_s = stream_rng(cfg.seed, 2 * i + 1)
        (c, y), _ = engine.run_with_corrupt_sender(strat, rng_r)
        sim = engine.simulate_sender(strat, rng_s)
        ic, iy = sim.receiver_out
        yield (c, bits_to_int(y)), (ic, bits_to_int(iy))


def _epr_scenario(cfg: ExperimentConfig):
    p = cfg.params
    strat = adversary.epr_teleport_receiver(p.n)
    for i in range(cfg.trials):
        rng = stream_rng(cfg.seed, i)
        res = engine.run_bqs_ot(p, rng, receiver=strat, model=cfg.model)
        both = (np.array_equal(res.receiver["s0_hat"], res.s0)
                and np.array_equal(res.receiver["s1_hat"], res.s1))
        # ideal world: the functionality withholds x_{1-c} entirely
        rng_i = stream_rng(cfg.seed, 10 ** 6 + i)
        ideal = engine.run_ideal_rot(p.ell, rng_i)
        guess = rng_i.integers(0, 2, p.ell, dtype=np.uint8)
        (ix0, ix1), (ic, iy) = ideal["A"], ideal["B"]
        ideal_both = np.array_equal(guess, (ix0, ix1)[1 - ic])
        yield (int(both),), (int(ideal_both),)


def _binding_scenario(cfg: ExperimentConfig):
    p = cfg.params
    strat = adversary.binding_attacker()
    for i in range(cfg.trials):
        res = engine.run_bc(0, 1, stream_rng(cfg.seed, i), p.ell,
                            committer=strat)
        # ideal BC simply refuses to open a different bit
        yield (int(res.cheat_success),), (0,)


def _reflection_scenario(cfg: ExperimentConfig):
    p = cfg.params
    for i in range(cfg.trials):
        res = engine.run_reflection_pair(p, stream_rng(cfg.seed, i))
        rng_i = stream_rng(cfg.seed, 10 ** 6 + i)
        ideal = engine.run_ideal_rot(p.ell, rng_i)
        (ix0, ix1), (ic, iy) = ideal["A"], ideal["B"]
        # an ideal receiver knows x_c only; matching the other string is luck
        guess = rng_i.integers(0, 2, p.ell, dtype=np.uint8)
        ideal_hit = np.array_equal(guess, (ix0, ix1)[1 - ic])
        yield (int(res.matches_x0 or res.matches_x1),), (int(ideal_hit),)


SCENARIOS = {
    "honest-rot": _honest_rot_scenario,
    "sender-corrupt": _sender_corrupt_scenario,
    "epr-teleport": _epr_scenario,
    "binding": _binding_scenario,
    "reflection": _reflection_scenario,
}


def run_experiment(cfg: ExperimentConfig) -> DistinguishReport:
    """N trials of the real and ideal worlds; TV over joint observables."""
    real_hist, ideal_hist = {}, {}
    rows = []
    for i, (real, ideal) in enumerate(SCENARIOS[cfg.scenario](cfg)):
        real_hist[real] = real_hist.get(real, 0) + 1
        ideal_hist[ideal] = ideal_hist.get(ideal, 0) + 1
        if cfg.out:
            rows.append({"trial": i, "side": "real", "observable": list(real)})
            rows.append({"trial": i, "side": "ideal", "observable": list(ideal)})
    tv = tv_distance(real_hist, ideal_hist)
    report = DistinguishReport(tv, confidence_radius(cfg.trials), cfg.trials,
                               len(real_hist), len(ideal_hist))
    if cfg.out:
        write_jsonl(cfg.out, cfg.resolved(), rows, report.to_json())
    return report


def write_jsonl(path: str, header: dict, rows: list, summary: dict):
    """Deterministic JSONL: header line, one row per record, summary line."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"config": header}, sort_keys=True) + "\n")
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": summary}, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# lemma-verification suites

def verify_lemma_suite(suite: str, cases: int, seed: int) -> dict:
    """Random-instance verification for the entropy lemmas."""
    violations = 0
    worst = math.inf
    rng = stream_rng(seed, 0)
    for i in range(cases):
        if suite == "splitting":
            sizes = (int(rng.integers(2, 9)), int(rng.integers(2, 9)),
                     int(rng.integers(1, 5)), int(rng.integers(1, 5)))
            d = entropy.JointDistribution.random(("X0", "X1", "K", "J"),
                                                 sizes, rng)
            eps = float(rng.choice([0.0, 0.01, 0.1]))
            beta = math.log2(sizes[3]) if sizes[3] > 1 else 0.0
            rep = entropy.verify_splitting(d, eps, beta)
        elif suite == "chain":
            sizes = (int(rng.integers(2, 9)), int(rng.integers(2, 9)),
                     int(rng.integers(1, 5)))
            d = entropy.JointDistribution.random(("X", "Y", "Z"), sizes, rng)
            rep = entropy.verify_chain_rule(d, "X", "Y", "Z", 0.01, 0.01)
        elif suite == "monotonicity":
            sizes = (int(rng.integers(2, 9)), int(rng.integers(2, 9)),
                     int(rng.integers(1, 5)))
            d = entropy.JointDistribution.random(("X", "Y", "Z"), sizes, rng)
            rep = entropy.verify_monotonicity(d, "X", "Y", "Z", 0.05)
        else:
            raise ValueError(f"unknown suite {suite!r}")
        if not rep.holds:
            violations += 1
        worst = min(worst, rep.slack)
    return {"suite": suite, "cases": cases, "violations": violations,
            "worst_slack": worst}


# ---------------------------------------------------------------------------
# CLI

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _add_param_args(p):
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--beta", type=int, default=0)
    p.add_argument("--eps", type=float, default=2.0 ** -4)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", type=str, default=None,
                   help="key=value file; command-line flags win")


def build_parser() -> _Parser:
    parser = _Parser(prog="bqsim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print every bound for a parameter set")
    _add_param_args(p)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--variant", type=str, default="main",
                   choices=sorted(bounds.VARIANTS))

    p = sub.add_parser("run-rot", help="honest randomized-OT runs")
    _add_param_args(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("run-ot", help="OT reduction on ideal ROT")
    _add_param_args(p)
    p.add_argument("--x0", type=str, required=True)
    p.add_argument("--x1", type=str, required=True)
    p.add_argument("--c", type=int, required=True, choices=(0, 1))

    p = sub.add_parser("run-bc", help="commitment reduction on ideal TOR")
    _add_param_args(p)
    p.add_argument("--b", type=int, required=True, choices=(0, 1))
    p.add_argument("--a", type=int, default=1, choices=(0, 1))

    p = sub.add_parser("compose-bc", help="commitment over real BQS-OT")
    _add_param_args(p)
    p.add_argument("--b", type=int, default=0, choices=(0, 1))
    p.add_argument("--a", type=int, default=1, choices=(0, 1))
    p.add_argument("--trials", type=int, default=1)

    p = sub.add_parser("attack", help="run a named adversary strategy")
    _add_param_args(p)
    p.add_argument("--name", type=str, required=True,
                   choices=sorted(adversary.BY_NAME))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--model", type=str, default="legacy",
                   choices=("legacy", "refined"))
    p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("verify-lemmas", help="random-instance lemma checks")
    p.add_argument("--suite", type=str, default="all",
                   choices=("splitting", "chain", "monotonicity", "all"))
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("distinguish", help="real-vs-ideal TV estimate")
    _add_param_args(p)
    p.add_argument("--scenario", type=str, required=True,
                   choices=sorted(SCENARIOS))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--model", type=str, default="refined",
                   choices=("legacy", "refined"))
    p.add_argument("--out", type=str, default=None)
    return parser


def _params_from_args(args) -> SecurityParams:
    overrides = {}
    if getattr(args, "config", None):
        overrides = _load_config_file(args.config)
    def pick(name, cast, default):
        flag = getattr(args, name, None)
        if flag is not None and flag != default:
            return flag
        if name in overrides:
            return cast(overrides[name])
        return default if flag is None else flag
    return SecurityParams(
        n=pick("n", int, 64), ell=pick("ell", int, 4),
        m=pick("m", int, 0), beta=pick("beta", int, 0),
        eps=pick("eps", float, 2.0 ** -4),
        lam=getattr(args, "lam", None))


def _seed_from_args(args) -> int:
    return args.seed if getattr(args, "seed", None) is not None \
        else default_seed()


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=float))


def _cmd_params(args) -> int:
    p = _params_from_args(args)
    out = bounds.all_bounds(p)
    out["feasible"] = out["max_ell"][args.variant] >= 1
    _emit(out)
    return 0 if out["feasible"] else 2


def _cmd_run_rot(args) -> int:
    p = _params_from_args(args)
    seed = _seed_from_args(args)
    s0, s1, y, c = engine.honest_ot_batch(p, args.trials, seed)
    sc = np.where(c[:, None] == 0, s0, s1)
    correct = int((sc == y).all(axis=1).sum())
    summary = {"trials": args.trials, "correct": correct,
               "correct_rate": correct / args.trials}
    if args.out:
        rows = [{"trial": i, "c": int(c[i]), "s0": bits_to_int(s0[i]),
                 "s1": bits_to_int(s1[i]), "y": bits_to_int(y[i])}
                for i in range(args.trials)]
        write_jsonl(args.out, {"command": "run-rot", "seed": seed,
                               "n": p.n, "ell": p.ell}, rows, summary)
    _emit(summary)
    return 0 if correct == args.trials else 2


def _cmd_run_ot(args) -> int:
    p = _params_from_args(args)
    seed = _seed_from_args(args)
    x0 = [int(ch) for ch in args.x0]
    x1 = [int(ch) for ch in args.x1]
    if len(x0) != len(x1):
        raise InvariantViolation("x0 and x1 must have equal length")
    res = engine.run_ot_from_rot(np.array(x0, np.uint8),
                                 np.array(x1, np.uint8), args.c,
                                 stream_rng(seed, 0))
    expected = (x0, x1)[args.c]
    ok = list(res.y) == list(expected)
    _emit({"y": "".join(str(v) for v in res.y), "correct": ok})
    return 0 if ok else 2


def _cmd_run_bc(args) -> int:
    p = _params_from_args(args)
    seed = _seed_from_args(args)
    res = engine.run_bc(args.b, args.a, stream_rng(seed, 0), p.ell)
    expected = args.b if args.a == 1 else None
    _emit({"verifier_output": res.verifier_output,
           "correct": res.verifier_output == expected})
    return 0 if res.verifier_output == expected else 2


def _cmd_compose_bc(args) -> int:
    p = _params_from_args(args)
    seed = _seed_from_args(args)
    correct = 0
    budget = None
    for i in range(args.trials):
        res = engine.compose(p, args.b, args.a, stream_rng(seed, i))
        budget = res.error_budget
        expected = args.b if args.a == 1 else None
        correct += int(res.verifier_output == expected)
    _emit({"trials": args.trials, "correct": correct, "error_budget": budget})
    return 0 if correct == args.trials else 2


def _cmd_attack(args) -> int:
    p = _params_from_args(args)
    seed = _seed_from_args(args)
    name = args.name
    if name == "binding":
        hits = 0
        for i in range(args.trials):
            res = engine.run_bc(0, 1, stream_rng(seed, i), p.ell,
                                committer=adversary.binding_attacker())
            hits += int(res.cheat_success)
        _emit({"attack": name, "trials": args.trials, "successes": hits,
               "rate": hits / args.trials, "bound": 2.0 ** -p.ell})
        return 0
    if name == "reflection":
        hits = 0
        for i in range(args.trials):
            res = engine.run_reflection_pair(p, stream_rng(seed, i))
            hits += int(res.matches_x0 or res.matches_x1)
        _emit({"attack": name, "trials": args.trials,
               "y_in_x0_x1": hits, "rate": hits / args.trials,
               "adversary_memory_qubits": 0})
        return 0 if hits == args.trials else 2
    if name == "epr-teleport":
        try:
            strat = adversary.epr_teleport_receiver(
                p.n, beta_bound=p.beta if args.model == "refined" else None)
        except ValueError as exc:
            _emit({"attack": name, "rejected": True, "reason": str(exc)})
            return 0
        hits = 0
        for i in range(args.trials):
            res = engine.run_bqs_ot(p, stream_rng(seed, i), receiver=strat,
                                    model=args.model)
            hits += int(np.array_equal(res.receiver["s0_hat"], res.s0)
                        and np.array_equal(res.receiver["s1_hat"], res.s1))
        _emit({"attack": name, "trials": args.trials, "both_strings": hits,
               "rate": hits / args.trials})
        return 0
    strat = adversary.BY_NAME[name](m=p.m, n=p.n)
    hits = 0
    for i in range(args.trials):
        res = engine.run_bqs_ot(p, stream_rng(seed, i), receiver=strat,
                                model=args.model)
        hits += int(np.array_equal(res.receiver["s0_hat"], res.s0)
                    and np.array_equal(res.receiver["s1_hat"], res.s1))
    _emit({"attack": name, "trials": args.trials, "both_strings": hits,
           "rate": hits / args.trials})
    return 0


def _cmd_verify_lemmas(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    suites = ["splitting", "chain", "monotonicity"] if args.suite == "all" \
        else [args.suite]
    out = [verify_lemma_suite(s, args.cases, seed) for s in suites]
    _emit({"results": out})
    return 0 if all(r["violations"] == 0 for r in out) else 2


def _cmd_distinguish(args) -> int:
    p = _params_from_args(args)
    cfg = ExperimentConfig(scenario=args.scenario, params=p,
                           trials=args.trials, seed=_seed_from_args(args),
                           model=args.model, out=args.out)
    report = run_experiment(cfg)
    _emit(report.to_json())
    return 0


COMMANDS = {
    "params": _cmd_params,
    "run-rot": _cmd_run_rot,
    "run-ot": _cmd_run_ot,
    "run-bc": _cmd_run_bc,
    "compose-bc": _cmd_compose_bc,
    "attack": _cmd_attack,
    "verify-lemmas": _cmd_verify_lemmas,
    "distinguish": _cmd_distinguish,
}


def cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:   # argparse help/usage paths
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (InvariantViolation, engine.MemoryBoundViolation) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli())
