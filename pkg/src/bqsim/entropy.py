"""Finite-distribution toolkit: min-entropy, event-smoothed min-entropy,
chain rule / monotonicity checks, and min-entropy splitting.

The smoothing oracle solves the event-based optimization exactly.  The
optimal event shaves probability mass off the largest conditional cells,
so the optimum is the smallest cap t for which the shaving cost

    sum_{x,y} max(0, P(x,y) - t P(y)) <= eps

is affordable; the answer is H = -log2 t.  The cost is piecewise linear
and decreasing in t, so t is found by an exact walk over the sorted
conditional probabilities (no iterative search).  An exact-rational mode
repeats the walk in Fraction arithmetic for small tables.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

PROB_ATOL = 1e-12


class JointDistribution:
    """Probability table over named finite classical variables."""

    def __init__(self, names, table):
        self.names = tuple(names)
        self.table = np.asarray(table, dtype=float)
        if self.table.ndim != len(self.names):
            raise ValueError("one table axis per variable required")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        if self.table.min() < -PROB_ATOL:
            raise ValueError("negative probability in table")
        if abs(self.table.sum() - 1.0) > PROB_ATOL:
            raise ValueError("probabilities must sum to 1")
        self.table = np.clip(self.table, 0.0, None)

    @property
    def sizes(self):
        return self.table.shape

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None

    def marginal(self, keep) -> np.ndarray:
        """Marginal table over the listed variables, in the listed order."""
        keep = [keep] if isinstance(keep, str) else list(keep)
        axes = tuple(i for i, n in enumerate(self.names) if n not in keep)
        marg = self.table.sum(axis=axes)
        order = [n for n in self.names if n in keep]
        perm = [order.index(n) for n in keep]
        return marg.transpose(perm)

    def size_of(self, names) -> int:
        names = [names] if isinstance(names, str) else list(names)
        out = 1
        for n in names:
            out *= self.sizes[self.axis(n)]
        return out

    @staticmethod
    def random(names, sizes, rng, sparsity: float = 0.0) -> "JointDistribution":
        """Random table with iid exponential weights, optionally sparsified."""
        w = rng.exponential(size=tuple(sizes))
        if sparsity > 0.0:
            mask = rng.random(size=w.shape) >= sparsity
            if not mask.any():
                mask.flat[int(rng.integers(mask.size))] = True
            w = w * mask
        return JointDistribution(names, w / w.sum())

    @staticmethod
    def from_csv(path, prob_column: str = "probability") -> "JointDistribution":
        """Load a table from CSV with one outcome column per variable."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
        if not rows:
            raise ValueError("empty distribution file")
        names = [c for c in reader.fieldnames if c != prob_column]
        sizes = [max(int(r[n]) for r in rows) + 1 for n in names]
        table = np.zeros(sizes)
        for r in rows:
            idx = tuple(int(r[n]) for n in names)
            table[idx] += float(r[prob_column])
        return JointDistribution(names, table)

    def to_csv(self, path, prob_column: str = "probability"):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(self.names) + [prob_column])
            for idx in np.ndindex(*self.sizes):
                p = self.table[idx]
                if p > 0.0:
                    writer.writerow(list(idx) + [repr(float(p))])


def _joint_2d(d: JointDistribution, target, given):
    """Flattened (target, given) marginal as a 2-D array."""
    target = [target] if isinstance(target, str) else list(target)
    given = [given] if isinstance(given, str) else list(given)
    if not target:
        raise ValueError("target variable set must be non-empty")
    if set(target) & set(given):
        raise ValueError("target and given sets must be disjoint")
    marg = d.marginal(target + given)
    nx = int(np.prod([d.sizes[d.axis(n)] for n in target]))
    return marg.reshape(nx, -1)


def min_entropy(d: JointDistribution, target, given=()) -> float:
    """H_min(target | given) = -log2 max_y max_x P(x|y)."""
    joint = _joint_2d(d, target, given)
    p_y = joint.sum(axis=0)
    live = p_y > 0.0
    worst = (joint[:, live].max(axis=0) / p_y[live]).max()
    return -math.log2(worst)


def smooth_min_entropy(d: JointDistribution, target, given=(),
                       eps: float = 0.0, exact: bool = False) -> float:
    """Event-smoothed min-entropy via the cap oracle described above."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must be in [0, 1)")
    joint = _joint_2d(d, target, given)
    p_y = joint.sum(axis=0)
    if exact:
        return _smooth_exact(joint, p_y, eps)
    live = p_y > 0.0
    p = joint[:, live]
    w = np.broadcast_to(p_y[live], p.shape)
    r = p / w
    mask = p > 0.0
    r, w = r[mask], w[mask]
    t = _smallest_cap(r, w, eps)
    return -math.log2(t)


def _smallest_cap(r, w, eps):
    """Smallest t with sum w*max(0, r - t) <= eps (piecewise-linear walk)."""
    order = np.argsort(r)[::-1]
    r, w = r[order], w[order]
    if eps <= 0.0:
        return float(r[0])
    # cost(t) on [r_{j+1}, r_j] is cum_wr[j] - t*cum_w[j] (cells 0..j)
    cum_w = np.cumsum(w)
    cum_wr = np.cumsum(w * r)
    cost_at_break = cum_wr - r * cum_w  # cost evaluated at t = r_j
    j = int(np.searchsorted(cost_at_break, eps, side="right")) - 1
    if j + 1 < r.size:
        t = (cum_wr[j] - eps) / cum_w[j] if j >= 0 else float(r[0])
        # clamp into the segment against rounding at breakpoints
        t = min(max(t, float(r[j + 1])), float(r[0]))
    else:
        t = (cum_wr[-1] - eps) / cum_w[-1]
        t = min(t, float(r[0]))
    return max(t, 1e-300)


def _smooth_exact(joint, p_y, eps):
    """Fraction-arithmetic version of the cap walk, for small tables."""
    eps_f = Fraction(eps).limit_denominator(10 ** 12)
    cells = []
    for yi in range(joint.shape[1]):
        py = Fraction(float(p_y[yi]))
        if py == 0:
            continue
        for xi in range(joint.shape[0]):
            p = Fraction(float(joint[xi, yi]))
            if p > 0:
                cells.append((p / py, py))
    cells.sort(key=lambda c: c[0], reverse=True)
    if eps_f <= 0:
        return -math.log2(float(cells[0][0]))
    cw = Fraction(0)
    cwr = Fraction(0)
    t = cells[0][0]
    for j, (r, w) in enumerate(cells):
        cw += w
        cwr += w * r
        nxt = cells[j + 1][0] if j + 1 < len(cells) else Fraction(0)
        t_star = (cwr - eps_f) / cw
        if t_star >= nxt:
            t = max(t_star, Fraction(0))
            break
    return -math.log2(float(max(t, Fraction(1, 10 ** 300))))


@dataclass
class SplitResult:
    """Derived choice bit for min-entropy splitting.

    c_table is indexed by (x1, k); the defining rule ignores x0.
    """
    c_table: np.ndarray
    threshold: float
    alpha: float
    beta: float

    def c_function(self, x0, x1, k) -> int:
        return int(self.c_table[x1, k])


@dataclass
class LemmaReport:
    holds: bool
    lhs: float
    rhs: float
    detail: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


SPLIT_VARS = ("X0", "X1", "K", "J")


def _split_marginals(d: JointDistribution):
    for v in SPLIT_VARS:
        d.axis(v)
    return d.marginal(SPLIT_VARS)


def split_choice(d: JointDistribution, alpha: float, beta: float) -> SplitResult:
    """The deterministic choice function f over (x0, x1, k).

    f(x0,x1,k) = 1 iff some j has P(x1 | k, j) >= 2^-((alpha-beta)/2).
    Requires variables named X0, X1, K, J and a J alphabet of <= 2^beta.
    """
    if not 0.0 <= beta < alpha:
        raise ValueError("need 0 <= beta < alpha")
    table = _split_marginals(d)
    n_j = table.shape[3]
    if n_j > 2.0 ** beta + 1e-9:
        raise ValueError(f"J alphabet {n_j} exceeds 2^beta")
    threshold = 2.0 ** (-(alpha - beta) / 2.0)
    p_x1kj = table.sum(axis=0)
    p_kj = p_x1kj.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(p_kj > 0.0, p_x1kj / p_kj, 0.0)
    c_table = (cond >= threshold - 1e-12).any(axis=2).astype(np.uint8)
    return SplitResult(c_table, threshold, alpha, beta)


def verify_splitting(d: JointDistribution, eps: float, beta: float,
                     alpha: float | None = None) -> LemmaReport:
    """Check H^eps_min(X_{1-C} C | K J) >= (alpha - beta)/2.

    alpha defaults to the oracle's smooth min-entropy of (X0, X1) given
    (K, J), which makes the lemma's precondition tight.
    """
    oracle_alpha = smooth_min_entropy(d, ("X0", "X1"), ("K", "J"), eps)
    if alpha is None:
        alpha = oracle_alpha
    elif oracle_alpha < alpha - 1e-9:
        return LemmaReport(False, oracle_alpha, alpha,
                           {"error": "precondition H >= alpha violated"})
    if alpha <= beta:
        # the guarantee (alpha - beta)/2 is non-positive: vacuously true
        return LemmaReport(True, 0.0, (alpha - beta) / 2.0,
                           {"alpha": alpha, "vacuous": True})
    split = split_choice(d, alpha, beta)
    table = _split_marginals(d)
    n0, n1, nk, nj = table.shape
    nw = max(n0, n1)
    out = np.zeros((nw, 2, nk, nj))
    for x1 in range(n1):
        for k in range(nk):
            c = split.c_table[x1, k]
            if c == 1:
                # X_{1-C} = X_0
                out[:n0, 1, k, :] += table[:, x1, k, :]
            else:
                out[x1, 0, k, :] += table[:, x1, k, :].sum(axis=0)
    dist = JointDistribution(("W", "C", "K", "J"), out)
    lhs = smooth_min_entropy(dist, ("W", "C"), ("K", "J"), eps)
    rhs = (alpha - beta) / 2.0
    return LemmaReport(lhs >= rhs - 1e-9, lhs, rhs, {"alpha": alpha})


def verify_chain_rule(d: JointDistribution, target, peel, given,
                      eps: float, eps2: float) -> LemmaReport:
    """H^{e+e'}_min(X | Y Z) >= H^e_min(X Y | Z) - log|Y| - log(1/e')."""
    if eps <= 0.0 or eps2 <= 0.0:
        raise ValueError("eps and eps' must be positive")
    target = [target] if isinstance(target, str) else list(target)
    peel = [peel] if isinstance(peel, str) else list(peel)
    given = [given] if isinstance(given, str) else list(given)
    lhs = smooth_min_entropy(d, target, peel + given, eps + eps2)
    rhs = (smooth_min_entropy(d, target + peel, given, eps)
           - math.log2(d.size_of(peel)) - math.log2(1.0 / eps2))
    return LemmaReport(lhs >= rhs - 1e-9, lhs, rhs)


def verify_monotonicity(d: JointDistribution, target, extra, given,
                        eps: float) -> LemmaReport:
    """H^eps_min(X Y | Z) >= H^eps_min(X | Z)."""
    target = [target] if isinstance(target, str) else list(target)
    extra = [extra] if isinstance(extra, str) else list(extra)
    given = [given] if isinstance(given, str) else list(given)
    lhs = smooth_min_entropy(d, target + extra, given, eps)
    rhs = smooth_min_entropy(d, target, given, eps)
    return LemmaReport(lhs >= rhs - 1e-9, lhs, rhs)


def split_function_sparse(p_x1_given_kj: dict, alpha: float, beta: float):
    """Choice rule on a sparse conditional {(x1, k, j): P(x1|k,j)}.

    Used when the full joint table would blow the enumeration budget.
    Returns the set of (x1, k) with f = 1 and the threshold.
    """
    if not 0.0 <= beta < alpha:
        raise ValueError("need 0 <= beta < alpha")
    threshold = 2.0 ** (-(alpha - beta) / 2.0)
    ones = {(x1, k) for (x1, k, _j), p in p_x1_given_kj.items()
            if p >= threshold - 1e-12}
    return ones, threshold
