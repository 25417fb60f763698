"""Closed-form parameter calculator for the protocol's security bounds.

Log convention: log means log base 2 everywhere except inside
uncertainty_epsilon and check_aux_inequality, whose exp/ln are natural
as the formulas are stated.  The uncertainty lower bound is evaluated in
the factored form (n/2)(1 - (8000 L / n)^(1/3)) with L = log2(1/eps),
which makes the sign change land exactly on n = 8000 L in floating
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# (coefficient of m, coefficient of beta) in 8l + c_m m + c_b beta <= RHS
VARIANTS = {
    "main": (10.0, 0.0),
    "pure-aux": (4.0, 2.0),
    "mixed-aux": (4.0, 6.0),
}

MAX_N_SEARCH = 10 ** 9


@dataclass
class SecurityParams:
    """Protocol parameters, all counts in bits/qubits."""
    n: int
    ell: int
    m: int = 0
    beta: int = 0
    eps: float = 2.0 ** -4
    q: int = 0
    lam: float | None = None
    s: int | None = None

    def __post_init__(self):
        if min(self.n, self.ell) < 0 or min(self.m, self.beta, self.q) < 0:
            raise ValueError("counts must be non-negative")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must be in (0, 1)")
        if self.lam is not None and not 0.0 < self.lam < 0.5:
            raise ValueError("lambda must be in (0, 1/2)")


def uncertainty_bound(n: int, eps: float) -> float:
    """n/2 - 10 (n^2 log(1/eps))^(1/3); positive iff n > 8000 log(1/eps)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    big_l = math.log2(1.0 / eps)
    return 0.5 * n * (1.0 - (8000.0 * big_l / n) ** (1.0 / 3.0))


def uncertainty_epsilon(lam: float, n: int):
    """Error and min-entropy rate of the basic uncertainty relation.

    Returns (eps, rate) with eps = exp(-lam^2 n / (32 (2 - log lam)^2))
    and rate = (1/2 - 2 lam) n.
    """
    if not 0.0 < lam < 0.5:
        raise ValueError("lambda must be in (0, 1/2)")
    if n < 1:
        raise ValueError("n must be >= 1")
    eps = math.exp(-(lam ** 2) * n / (32.0 * (2.0 - math.log2(lam)) ** 2))
    rate = (0.5 - 2.0 * lam) * n
    return eps, rate


def check_aux_inequality(x: float) -> dict:
    """(2 - log x)^-2 >= (e^3 ln(2)^2 / 54) x on (0, 0.5].

    Also reports the derivative form (ln2/2)(2 - log x)^3 x, which is
    bounded by 54/(e^3 ln(2)^2) with equality exactly at x = 4/e^3; the
    original inequality is strict on the whole interval.
    """
    if not 0.0 < x <= 0.5:
        raise ValueError("x must be in (0, 0.5]")
    lhs = (2.0 - math.log2(x)) ** -2
    rhs = (math.e ** 3) * (math.log(2.0) ** 2) / 54.0 * x
    f = 0.5 * math.log(2.0) * (2.0 - math.log2(x)) ** 3 * x
    f_bound = 54.0 / (math.e ** 3 * math.log(2.0) ** 2)
    return {"holds": lhs >= rhs - 1e-15, "lhs": lhs, "rhs": rhs,
            "deriv_form": f, "deriv_bound": f_bound,
            "deriv_holds": f <= f_bound + 1e-12}


def _budget(n: int, m: int, beta: int, eps: float, variant: str) -> float:
    """RHS of the selected inequality minus the memory/aux terms."""
    try:
        cm, cb = VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None
    big_l = math.log2(1.0 / eps)
    rhs = n * (1.0 - (8000.0 * big_l / n) ** (1.0 / 3.0)) - 12.0 * big_l - 4.0
    return rhs - cm * m - cb * beta


def max_ell(n: int, m: int, beta: int, eps: float, variant: str = "main") -> int:
    """Largest l >= 0 satisfying the selected bound; 0 if infeasible."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    return max(0, math.floor(_budget(n, m, beta, eps, variant) / 8.0))


def min_n(ell: int, m: int, beta: int, eps: float, variant: str = "main",
          cap: int = MAX_N_SEARCH) -> int:
    """Smallest n with max_ell(n, ...) >= ell.

    The budget in n falls then rises (the cube-root term dominates small
    n), so the feasible set is an upper tail; we bracket by doubling and
    bisect on the rising branch, spot-checking monotonicity there rather
    than trusting the algebra.
    """
    if ell < 0:
        raise ValueError("ell must be >= 0")
    need = 8.0 * ell

    def feasible(n):
        return _budget(n, m, beta, eps, variant) >= need

    hi = 1
    while hi <= cap and not feasible(hi):
        hi *= 2
    if hi > cap:
        raise ValueError(f"no feasible n below cap {cap}")
    lo = max(1, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid + 1
    # numeric monotonicity check on the branch we searched
    probe = [hi + step for step in (0, 1, 2, 7, 61, 500)]
    vals = [_budget(p, m, beta, eps, variant) for p in probe]
    if any(b < a - 1e-6 for a, b in zip(vals, vals[1:])):
        raise AssertionError("budget not monotone above the found boundary")
    return hi


def bc_error(ell: int) -> float:
    """Binding error of the commitment reduction: 2^-l."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return 2.0 ** (-ell)


def composed_bc_error(eps: float) -> dict:
    """Error budget of the full commitment stack: 6 eps at l = log(1/eps)."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    return {"ell": math.log2(1.0 / eps), "total": 6.0 * eps}


def all_bounds(p: SecurityParams) -> dict:
    """Every bound for one parameter set, as a plain dict for the CLI."""
    out = {
        "uncertainty_bound": uncertainty_bound(p.n, p.eps),
        "max_ell": {v: max_ell(p.n, p.m, p.beta, p.eps, v) for v in VARIANTS},
        "pa_guarantee_eps": 3.0 * p.eps,
        "composed_bc": composed_bc_error(p.eps),
    }
    if p.ell >= 1:
        out["bc_error"] = bc_error(p.ell)
    if p.lam is not None:
        eps, rate = uncertainty_epsilon(p.lam, p.n)
        out["uncertainty_epsilon"] = {"eps": eps, "rate": rate}
    return out
