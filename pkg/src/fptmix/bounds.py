"""Numeric evaluation of the closed-form running-time bounds.

Every objective is evaluated in log space (x^x terms overflow floats fast),
with 0 * log 0 := 0 at boundary points.  Inner one-dimensional maximizations
run a coarse grid scan refined by golden-section search to 1e-9 in the
argument.  The near-unity nuisance factor 4^(1/10^10) is carried exactly
where the reference tables carry it and omitted elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ParameterError

_FOUR_EPS = 4.0 ** 1e-10  # per-k nuisance factor attached to the tree-and-paths tables
_TWO_EPS = 2.0 ** 1e-10


def _xlogx(x: float) -> float:
    if x < 0:
        if x > -1e-12:
            return 0.0
        raise ParameterError(f"negative base {x} in an x^x term")
    return 0.0 if x == 0 else x * math.log(x)


def _plogq(p: float, q: float) -> float:
    """p * log(q) with the p == 0 boundary treated as 0."""
    if p == 0:
        return 0.0
    if q <= 0:
        raise ParameterError(f"log of non-positive value {q} (domain edge)")
    return p * math.log(q)


def golden_max(fn, lo: float, hi: float, grid: int = 10_001, tol: float = 1e-9):
    """Coarse grid scan followed by golden-section refinement.

    Returns (argmax, value).  The scan brackets the best grid point; the
    refinement assumes local unimodality inside that bracket, which the
    concavity sanity check in the tests watches independently.
    """
    if hi < lo:
        raise ParameterError("empty maximization interval")
    if hi == lo:
        return lo, fn(lo)
    xs = [lo + (hi - lo) * i / (grid - 1) for i in range(grid)]
    vals = [fn(x) for x in xs]
    best = max(range(grid), key=lambda i: vals[i])
    a = xs[max(0, best - 1)]
    b = xs[min(grid - 1, best + 1)]
    phi = (math.sqrt(5) - 1) / 2
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    x = (a + b) / 2
    return x, fn(x)


def log_tradeoff_term(c: float, a: float) -> float:
    """log of c^(2-a) / (a^a (c-a)^(2-2a)), the single-part reduction cost."""
    return _plogq(2 - a, c) - _xlogx(a) - _plogq(2 - 2 * a, c - a)


def log_leafy_term(c: float, b: float) -> float:
    """log of the high-leaf-count branch of the tree-and-paths bound."""
    return (_plogq(5 * b - 1, c * (1 + b))
            - _xlogx(3 * (1 - b)) * (1.0 if b != 1 else 1.0)
            - _plogq(4 * (2 * b - 1), c * (1 + b) - 3 * (1 - b)))


def _leafy(c: float, b: float) -> float:
    # guard the open lower end of the domain
    if c * (1 + b) - 3 * (1 - b) <= 0:
        return -math.inf
    return log_leafy_term(c, b)


def alpha_for(c: float):
    return golden_max(lambda a: log_tradeoff_term(c, a), 0.0, 1.0)


def beta_for(c: float, alpha: float):
    lo = (3 - alpha) / (3 + alpha)
    return golden_max(lambda b: _leafy(c, b), lo, 1.0)


def alpha_beta_table(c_list) -> list[dict]:
    """Rows (c, alpha, first-branch value, (3-a)/(3+a), beta, second-branch
    value); the value columns carry the 4^(1/10^10) factor."""
    rows = []
    for c in c_list:
        a, la = alpha_for(c)
        b, lb = beta_for(c, a)
        rows.append({
            "c": c,
            "alpha": a,
            "branch1": math.exp(la * 6 / (3 + a)) * _FOUR_EPS,
            "threshold": (3 - a) / (3 + a),
            "beta": b,
            "branch2": math.exp(lb) * _FOUR_EPS,
        })
    return rows


def kiob_det_bound(c: float, lstar: float = 0.0) -> dict:
    """Per-k base of the deterministic tree-and-paths driver.

    ``lstar`` is the leaf-threshold fraction l*/k; the reference table for
    the all-leaf-counts driver corresponds to lstar -> 0.
    """
    a, la = alpha_for(c)
    b, lb = beta_for(c, a)
    threshold = (3 - a) / (3 + a)
    if b <= lstar:
        base = math.exp(_leafy(c, lstar)) * _FOUR_EPS
        arg = {"branch": "leafy-at-lstar", "alpha": a, "beta": lstar}
    elif threshold <= lstar <= b:
        base = math.exp(lb) * _FOUR_EPS
        arg = {"branch": "leafy-peak", "alpha": a, "beta": b}
    else:
        first = math.exp(la * 6 / (3 + a))
        second = math.exp(lb)
        base = max(first, second) * _FOUR_EPS
        arg = {"branch": "max-of-both", "alpha": a, "beta": b,
               "first": first * _FOUR_EPS, "second": second * _FOUR_EPS}
    return {"base": base, "argmax": arg}


def kiob_rand_bound(c: float, gamma: float) -> dict:
    """Leaf thresholding at gamma*k: the representative-sets branch covers
    high leaf counts, everything below goes to the 2^(k+l) black box."""
    det = kiob_det_bound(c, lstar=gamma)
    cross = 2.0 ** (1 + gamma)
    det["argmax"]["crossTerm"] = cross
    det["crossTerm"] = cross
    return det


def _entropy(lam: float) -> float:
    return -_xlogx(lam) - _xlogx(1 - lam)


def kpath_bound(delta: float, gamma: float, c1: float, c2: float,
                cl: float, cr: float) -> dict:
    """Z = max(Z1, Z2): each branch couples a blue-part reduction term with
    a red-part term whose usage fraction is pinned to the blue progress."""
    if not c1 >= c2 >= 1:
        raise ParameterError("need c1 >= c2 >= 1")
    al, _ = alpha_for(cl)
    ar, _ = alpha_for(cr)
    b1, _ = alpha_for(c1)
    b2, _ = alpha_for(c2)
    half_p = 0.5 + delta
    half_m = 0.5 - delta
    flags = []
    if not half_p < b1:
        flags.append("first-branch pinning assumption violated")
    if not b2 < half_p + ar * half_m:
        flags.append("second-branch pinning assumption violated")
    a_prime = max(0.0, (b2 - half_p) / half_m)

    def y1(a: float) -> float:
        return (half_p * gamma * log_tradeoff_term(cl, a)
                + (1 - gamma) * log_tradeoff_term(c1, a * half_p))

    def y2(a: float) -> float:
        # the reference rows pin the second branch's blue factor at the
        # (1/2 + delta) fraction; the (1/2 - delta) variant reproduces none
        # of them
        return (half_p * gamma * log_tradeoff_term(cr, a)
                + (1 - gamma) * log_tradeoff_term(c2, half_p + a * half_m))

    a1, ly1 = golden_max(y1, al, 1.0)
    a2, ly2 = golden_max(y2, a_prime, ar)
    color = math.exp(gamma * _entropy(half_m))  # divide-and-color universal set factor
    z1 = math.exp(ly1) * color * _TWO_EPS
    z2 = math.exp(ly2) * color * _TWO_EPS
    return {
        "base": max(z1, z2),
        "Z1": z1,
        "Z2": z2,
        "argmax": {"alpha1": a1, "alpha2": a2, "alphaL": al, "alphaR": ar,
                   "beta1": b1, "beta2": b2, "flags": flags},
    }


def _staged_argmax(t_next, objective, inv_eps: int) -> dict:
    """Shared scaffolding for the unbalanced-cutting bounds: run the
    continuous deletion recursion, scan every stage cell, refine the best."""
    eps = 1.0 / inv_eps
    t_vals = np.zeros(inv_eps + 1)
    for j in range(1, inv_eps + 1):
        t_vals[j] = t_next(t_vals[j - 1], j, eps)
    idx = np.arange(1, inv_eps + 1)
    that = t_vals[idx - 1]
    cell_right = objective(idx.astype(float), that, eps)
    order = np.argsort(cell_right)[::-1][:200]
    best = (-math.inf, None, None)
    for i in order:
        stage = int(idx[i])
        th = float(that[i])
        fn = lambda a: float(objective(np.asarray([a]), np.asarray([th]), eps)[0])
        a, val = golden_max(fn, stage - 1, stage, grid=201)
        if val > best[0]:
            best = (val, stage, a)
    val, stage, a = best
    return {"base": math.exp(val), "argmax": {"i": stage, "alpha": a,
                                              "T": float(t_vals[stage - 1])}}


def wsp_bound(c: float, inv_eps: int = 100_000) -> dict:
    """Per-k base of the staged packing bound at the reference epsilon."""

    def t_next(prev, j, eps):
        return prev + eps * (2 * (j - 1) * eps - prev) / (3 * (1 - (j - 1) * eps))

    def objective(alpha, that, eps):
        ae = alpha * eps
        big = 3 - ae - that
        small = 2 * ae - that
        small = np.maximum(small, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = ((6 - 4 * ae - that) * np.log(c * big)
                    - np.where(small > 0, small * np.log(small), 0.0)
                    - (6 - 6 * ae) * np.log(c * big - small))
        return term

    return _staged_argmax(t_next, objective, inv_eps)


def p2p_bound(inv_eps: int = 100_000) -> dict:
    """Per-k base of the packing-compression bound; worst case has the
    footprint parameters maximal, which fixes the leading constant 2."""

    def t_next(prev, j, eps):
        return prev + eps * (2 + 2 * (j - 1) * eps - prev) / (3 * (1 - (j - 1) * eps))

    def objective(alpha, that, eps):
        ae = alpha * eps
        top = 6 - ae - that
        mid = 2 + 2 * ae - that
        low = 4 - 3 * ae
        with np.errstate(divide="ignore", invalid="ignore"):
            term = top * np.log(top) - mid * np.log(mid) - low * np.log(low)
        return term / 2.0

    return _staged_argmax(t_next, objective, inv_eps)


@dataclass(frozen=True)
class BoundQuery:
    which: str  # kiob-det | kiob-rand | kpath | wsp | p2p
    parameters: dict = field(default_factory=dict)


def eval_bound(query: BoundQuery) -> dict:
    p = dict(query.parameters)
    if query.which == "kiob-det":
        return kiob_det_bound(p.get("c", 1.497), p.get("lstar", 0.0))
    if query.which == "kiob-rand":
        return kiob_rand_bound(p.get("c", 1.765), p.get("gamma", 0.8545))
    if query.which == "kpath":
        return kpath_bound(p.get("delta", 0.046), p.get("gamma", 0.084),
                           p.get("c1", 1.504), p.get("c2", 1.398),
                           p.get("cl", 1.092), p.get("cr", 1.876))
    if query.which == "wsp":
        return wsp_bound(p.get("c", 1.591), p.get("invEps", 100_000))
    if query.which == "p2p":
        return p2p_bound(p.get("invEps", 100_000))
    raise ParameterError(f"unknown bound query {query.which!r}")


# Reference rows the tables are checked against (the constants the tool
# is expected to reproduce).
REFERENCE_TABLE1 = {
    1.0:   (0.55013, 5.873, 0.69008, 0.71350, 5.9441),
    1.4:   (0.54908, 5.094, 0.69058, 0.71582, 5.1552),
    1.45:  (0.55302, 5.080, 0.68870, 0.71441, 5.1424),
    1.495: (0.55692, 5.075, 0.68685, 0.71299, 5.13864),
    1.496: (0.55701, 5.075, 0.68681, 0.71296, 5.13864),
    1.497: (0.55710, 5.075, 0.68677, 0.71293, 5.13863),
    1.498: (0.55719, 5.075, 0.68672, 0.71289, 5.13863),
    1.499: (0.55729, 5.075, 0.68669, 0.71286, 5.13864),
    1.5:   (0.55737, 5.075, 0.68664, 0.71283, 5.13865),
}
REFERENCE_TABLE2 = {
    1.0: 5.9441, 1.4: 5.1552, 1.45: 5.1424, 1.495: 5.13864, 1.496: 5.13864,
    1.497: 5.13863, 1.498: 5.13863, 1.499: 5.13864, 1.5: 5.13865,
}
REFERENCE_TABLE3 = {
    (1.763, 0.8544): 3.617665566, (1.764, 0.8544): 3.617665007,
    (1.765, 0.8544): 3.617665035, (1.766, 0.8544): 3.617665648,
    (1.763, 0.8545): 3.615894763, (1.764, 0.8545): 3.615894103,
    (1.765, 0.8545): 3.615894029, (1.766, 0.8545): 3.615894539,
}
REFERENCE_TABLE4 = {
    (0.046, 0.084, 1.504, 1.398, 1.092, 1.876): (2.5960542, 2.5960542, 2.5960425),
    (0.045, 0.084, 1.504, 1.398, 1.092, 1.876): (2.5965734, 2.5953152, 2.5965734),
    (0.047, 0.084, 1.504, 1.398, 1.092, 1.876): (2.5967889, 2.5967889, 2.5955049),
    (0.046, 0.083, 1.504, 1.398, 1.092, 1.876): (2.5960903, 2.5960421, 2.5960903),
    (0.046, 0.085, 1.504, 1.398, 1.092, 1.876): (2.5960711, 2.5960711, 2.5959989),
    (0.046, 0.084, 1.503, 1.398, 1.092, 1.876): (2.5960547, 2.5960547, 2.5960425),
    (0.046, 0.084, 1.505, 1.398, 1.092, 1.876): (2.5960545, 2.5960545, 2.5960425),
    (0.046, 0.084, 1.504, 1.397, 1.092, 1.876): (2.5960542, 2.5960542, 2.5960430),
    (0.046, 0.084, 1.504, 1.399, 1.092, 1.876): (2.5960542, 2.5960542, 2.5960434),
    (0.046, 0.084, 1.504, 1.398, 1.091, 1.876): (2.5960544, 2.5960544, 2.5960425),
    (0.046, 0.084, 1.504, 1.398, 1.093, 1.876): (2.5960545, 2.5960545, 2.5960425),
    (0.046, 0.084, 1.504, 1.398, 1.092, 1.875): (2.5960542, 2.5960542, 2.5960425),
    (0.046, 0.084, 1.504, 1.398, 1.092, 1.877): (2.5960542, 2.5960542, 2.5960425),
}
REFERENCE_TABLE5 = {
    1.59:  (8.096400, 54511, 0.1476545),
    1.591: (8.096396, 54515, 0.1476821),
    1.592: (8.096397, 54518, 0.1477028),
}
REFERENCE_P2P = (6.77682, 6377, 0.04485)
