"""Weighted k-path via balanced cutting and divide-and-color.

The cut subproblem fixes, for a path on k nodes, which nodes begin and end
each of 1/eps small pieces (four injective endpoint maps plus the two middle
endpoints), plus a split of a small "blue" node set into a left part L used
only while building early pieces and a right part R used only in late ones.
Its solver is a three-phase dynamic program (early pieces / middle piece /
late pieces) over families of internal-node sets, with generalized
representative reductions after every entry; once the middle piece is done,
all L nodes are dropped from partial solutions.

The top-level search enumerates universal-set colorings and cut-node
choices and hands each legal tuple to the cut solver.  At realistic
parameters that enumeration is astronomically large; the budget makes this
explicit, a small-k guard answers by brute force, and the witness
constructor builds an accepting cut instance directly from a known path so
the cut solver is exercised end to end without the outer enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .core import (
    BudgetExceededError,
    Digraph,
    FptMixError,
    OrderedUniverse,
    ParameterError,
    add_weights,
)
from .core import WeightedSetFamily
from .repsets import PartitionPart, PartitionSpec, select_representative_positions
from . import unisets


@dataclass(frozen=True)
class KcwpTradeoffs:
    c1: float = 1.504
    c2: float = 1.398
    cl: float = 1.092
    cr: float = 1.876

    def __post_init__(self):
        if not (self.c1 >= self.c2 >= 1 and self.cl >= 1 and self.cr >= 1):
            raise ParameterError("tradeoffs need c1 >= c2 >= 1 and cl, cr >= 1")


def _check_fraction(name: str, value: Fraction):
    if not 0 < value < Fraction(1, 10):
        raise ParameterError(f"{name} must lie strictly between 0 and 0.1")


@dataclass(frozen=True)
class KcwpParams:
    kt: int
    m: int
    mt: int
    ek: int
    k1: int
    k2: int
    k3: int
    mid: int

    @property
    def x(self) -> int:
        return self.k1 + self.k2


def kcwp_params(k: int, inv_eps: int, delta: Fraction, gamma: Fraction) -> KcwpParams:
    if inv_eps < 1:
        raise ParameterError("1/eps must be a positive integer")
    _check_fraction("eps", Fraction(1, inv_eps))
    _check_fraction("delta", Fraction(delta))
    _check_fraction("gamma", Fraction(gamma))
    m2 = inv_eps - 1
    if m2 % 2:
        raise ParameterError("(1/eps - 1) must be even")
    mt = Fraction(delta) * m2
    if mt.denominator != 1:
        raise ParameterError("delta * (1/eps - 1) must be an integer")
    kt = k - 1
    ek = kt // inv_eps
    k1 = int((Fraction(1, 2) + delta) * gamma * k)
    k2 = int((Fraction(1, 2) - delta) * gamma * k)
    m = m2 // 2
    mid = k - 2 * m * ek - 2
    k3 = kt - inv_eps - k1 - k2
    return KcwpParams(kt, m, int(mt), ek, k1, k2, k3, mid)


@dataclass(frozen=True)
class KcwpInstance:
    digraph: Digraph
    W: int
    k: int
    inv_eps: int
    delta: Fraction
    gamma: Fraction
    L: frozenset
    R: frozenset
    l1: tuple[int, ...]
    l2: tuple[int, ...]
    r1: tuple[int, ...]
    r2: tuple[int, ...]
    vl: int
    vr: int

    def __post_init__(self):
        par = self.params()
        n = self.digraph.node_count
        if self.L & self.R:
            raise ParameterError("L and R must be disjoint")
        blue = self.L | self.R
        for name, fn, length in (("l1", self.l1, par.m + par.mt), ("l2", self.l2, par.m + par.mt),
                                 ("r1", self.r1, par.m - par.mt), ("r2", self.r2, par.m - par.mt)):
            if len(fn) != length:
                raise ParameterError(f"{name} must have {length} values")
            if len(set(fn)) != len(fn):
                raise ParameterError(f"{name} must be injective")
            for v in fn:
                if not 0 <= v < n or v in blue:
                    raise ParameterError(f"{name} must map into nodes outside L and R")
        for v in (self.vl, self.vr):
            if not 0 <= v < n or v in blue:
                raise ParameterError("vl/vr must be nodes outside L and R")
        if self.vl == self.vr:
            raise ParameterError("vl and vr must be distinct")
        for v in blue:
            if not 0 <= v < n:
                raise ParameterError("L/R node out of range")

    def params(self) -> KcwpParams:
        return kcwp_params(self.k, self.inv_eps, self.delta, self.gamma)


def kcwp_instance_to_document(inst: KcwpInstance) -> str:
    import json

    doc = {
        "digraph": {"nodes": inst.digraph.node_count,
                    "arcs": [[t, h, w] for t, h, w in inst.digraph.arcs]},
        "W": inst.W, "k": inst.k, "invEps": inst.inv_eps,
        "delta": str(inst.delta), "gamma": str(inst.gamma),
        "L": sorted(inst.L), "R": sorted(inst.R),
        "l1": list(inst.l1), "l2": list(inst.l2),
        "r1": list(inst.r1), "r2": list(inst.r2),
        "vl": inst.vl, "vr": inst.vr,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def kcwp_instance_from_document(document: str | bytes) -> KcwpInstance:
    import json

    data = json.loads(document)
    g = Digraph(data["digraph"]["nodes"],
                tuple(tuple(a) for a in data["digraph"]["arcs"]))
    return KcwpInstance(
        g, data["W"], data["k"], data["invEps"],
        Fraction(data["delta"]), Fraction(data["gamma"]),
        frozenset(data["L"]), frozenset(data["R"]),
        tuple(data["l1"]), tuple(data["l2"]),
        tuple(data["r1"]), tuple(data["r2"]),
        data["vl"], data["vr"])


@dataclass(frozen=True)
class KcwpValidation:
    valid: bool
    condition: int | None = None
    detail: str | None = None


def validate_kcwp(inst: KcwpInstance) -> KcwpValidation:
    """The two endpoint-map conditions: no node starts or ends two pieces,
    and starts/ends line up into a single open chain."""
    il1, il2 = set(inst.l1), set(inst.l2)
    ir1, ir2 = set(inst.r1), set(inst.r2)
    if il1 & ir1:
        return KcwpValidation(False, 1, f"start maps share {sorted(il1 & ir1)}")
    if il2 & ir2:
        return KcwpValidation(False, 1, f"end maps share {sorted(il2 & ir2)}")
    if inst.vl in il1 | ir1:
        return KcwpValidation(False, 1, f"vl={inst.vl} also starts another piece")
    if inst.vr in il2 | ir2:
        return KcwpValidation(False, 1, f"vr={inst.vr} also ends another piece")
    starts = il1 | ir1 | {inst.vl}
    ends = il2 | ir2 | {inst.vr}
    if len(starts - ends) != 1 or len(ends - starts) != 1:
        return KcwpValidation(
            False, 2,
            f"start/end imbalance: {sorted(starts - ends)} vs {sorted(ends - starts)}")
    return KcwpValidation(True)


@dataclass(frozen=True)
class KcwpResult:
    accept: bool
    pieces: tuple[tuple[int, ...], ...] | None = None  # full node lists, endpoints included
    weight: int | None = None
    chained: bool | None = None


def solve_kcwp(inst: KcwpInstance, tradeoffs: KcwpTradeoffs | None = None,
               reduce: bool = True, trace: dict | None = None,
               audit: bool = False) -> KcwpResult:
    """Three-phase staged DP over internal-node sets.

    Phase tables hold, per (piece progress, per-part usage counts, last
    node), a min-weight family of internal-node sets; each entry is replaced
    by a generalized representative family after it is computed.  Once the
    middle piece completes, L nodes are deleted from stored sets and the L
    part leaves the partition.
    """
    tradeoffs = tradeoffs or KcwpTradeoffs()
    check = validate_kcwp(inst)
    if not check.valid:
        raise ParameterError(f"function condition {check.condition} violated: {check.detail}")
    par = inst.params()
    if par.ek - 1 < 1 or par.mid < 1:
        raise ParameterError("degenerate regime: pieces need at least one internal node")
    g = inst.digraph
    n = g.node_count
    weights = g.arc_weights()
    out = g.out_neighbors()
    endp = set(inst.l1) | set(inst.l2) | set(inst.r1) | set(inst.r2) | {inst.vl, inst.vr}
    L, R = set(inst.L), set(inst.R)
    e3 = [v for v in range(n) if v not in L and v not in R and v not in endp]
    k1, k2, k3, mid, ek, m, mt = par.k1, par.k2, par.k3, par.mid, par.ek, par.m, par.mt
    piece_len = ek - 1
    left_total = (m + mt) * piece_len
    aftermid = left_total + mid
    final_total = aftermid + (m - mt) * piece_len
    universe = OrderedUniverse.from_labels(str(v) for v in range(n))

    def reduce_entry(entry: dict, parts: tuple[PartitionPart, ...]) -> dict:
        if not reduce or len(entry) <= 1:
            return entry
        ordered = sorted(entry.items(), key=lambda kv: sorted(kv[0]))
        size = len(ordered[0][0])
        sets = tuple((tuple(sorted(fs)), w) for fs, (w, _) in ordered)
        wsf = WeightedSetFamily(universe, size, sets, "min")
        keep, _ = select_representative_positions(PartitionSpec(parts), wsf, "min")
        if trace is not None:
            trace["peak_family"] = max(trace.get("peak_family", 0), len(entry))
        return {ordered[i][0]: entry[ordered[i][0]] for i in keep}

    def put(layer, key, fs, weight, payload):
        entry = layer.setdefault(key, {})
        old = entry.get(fs)
        if old is None or weight < old[0]:
            entry[fs] = (weight, payload)

    def audit_layer(layer, phase: str):
        # budget ledger: stored bitsets carry exactly the counts the entry
        # coordinates claim, and never touch forbidden universes
        for key, entry in layer.items():
            for fs in entry:
                in_l = sum(1 for v in fs if v in L)
                in_r = sum(1 for v in fs if v in R)
                assert not fs & endp, (phase, key)
                if phase == "M":
                    j, s, _ = key
                    assert in_r == 0 and in_l == j and len(fs) - in_l == s, (phase, key)
                elif phase == "N":
                    i, j, s, _ = key
                    assert in_l == i and in_r == j and len(fs) - in_l - in_r == s
                else:
                    j, s, _ = key
                    assert in_l == 0 and in_r == j and len(fs) - in_r == s

    L_t, R_t, E3_t = tuple(sorted(L)), tuple(sorted(R)), tuple(e3)
    layers: dict[int, dict] = {}

    def m_piece(total: int) -> int:
        return (total - 1) // piece_len + 1

    def m_bound_ok(i: int, j: int) -> bool:
        return Fraction(j) >= Fraction(i - 1, m + mt) * (k1 - mid)

    def k_bound_ok(i: int, j: int) -> bool:
        return Fraction(j) <= Fraction(i, m - mt) * (k2 - mid) + mid

    # ---- phase M: early pieces, universe excludes R -----------------------
    for total in range(1, left_total + 1):
        layer: dict = {}
        piece = m_piece(total)
        start_of_piece = total == (piece - 1) * piece_len + 1
        if total == 1:
            head = inst.l1[0]
            for v in sorted(out[head]):
                if v in R or v in endp:
                    continue
                j = 1 if v in L else 0
                s = 1 - j
                if j > k1 or s > k3 or not m_bound_ok(1, j):
                    continue
                put(layer, (j, s, v), frozenset((v,)), weights[(head, v)], (None, None, None, v))
        elif start_of_piece:
            prev = layers[total - 1]
            tail = inst.l2[piece - 2]
            head = inst.l1[piece - 1]
            for (j, s, u), entry in prev.items():
                if (u, tail) not in weights:
                    continue
                bridge = weights[(u, tail)]
                for v in sorted(out[head]):
                    if v in R or v in endp:
                        continue
                    dj = 1 if v in L else 0
                    nj, ns = j + dj, s + (1 - dj)
                    if nj > k1 or ns > k3 or not m_bound_ok(piece, nj):
                        continue
                    for fs, (w, _) in entry.items():
                        if v in fs:
                            continue
                        put(layer, (nj, ns, v), fs | {v},
                            add_weights(add_weights(w, bridge), weights[(head, v)]),
                            (total - 1, (j, s, u), fs, v))
        else:
            prev = layers[total - 1]
            for (j, s, u), entry in prev.items():
                for v in sorted(out[u]):
                    if v in R or v in endp:
                        continue
                    dj = 1 if v in L else 0
                    nj, ns = j + dj, s + (1 - dj)
                    if nj > k1 or ns > k3 or not m_bound_ok(piece, nj):
                        continue
                    for fs, (w, _) in entry.items():
                        if v in fs:
                            continue
                        put(layer, (nj, ns, v), fs | {v}, add_weights(w, weights[(u, v)]),
                            (total - 1, (j, s, u), fs, v))
        for key in sorted(layer):
            j, s, _ = key
            parts = (PartitionPart(L_t, k1, j, tradeoffs.cl),
                     PartitionPart(R_t, k2, 0, 1.0),
                     PartitionPart(E3_t, k3, s, tradeoffs.c1))
            layer[key] = reduce_entry(layer[key], parts)
        if audit:
            audit_layer(layer, "M")
        layers[total] = layer

    # ---- phase N: the middle piece, L and R both allowed ------------------
    for total in range(left_total + 1, aftermid + 1):
        layer = {}
        if total == left_total + 1:
            prev = layers[total - 1] if left_total else {}
            tail = inst.l2[m + mt - 1] if m + mt else None
            for (j, s, u), entry in prev.items():
                if (u, tail) not in weights:
                    continue
                bridge = weights[(u, tail)]
                for v in sorted(out[inst.vl]):
                    if v in endp:
                        continue
                    di = 1 if v in L else 0
                    dj = 1 if v in R else 0
                    ni, nj, ns = j + di, dj, s + (1 - di - dj)
                    if ni > k1 or nj > k2 or ns > k3 or ni < k1 - (aftermid - total):
                        continue
                    for fs, (w, _) in entry.items():
                        if v in fs:
                            continue
                        put(layer, (ni, nj, ns, v), fs | {v},
                            add_weights(add_weights(w, bridge), weights[(inst.vl, v)]),
                            (total - 1, (j, s, u), fs, v))
        else:
            prev = layers[total - 1]
            for (i, j, s, u), entry in prev.items():
                for v in sorted(out[u]):
                    if v in endp:
                        continue
                    di = 1 if v in L else 0
                    dj = 1 if v in R else 0
                    ni, nj, ns = i + di, j + dj, s + (1 - di - dj)
                    if ni > k1 or nj > k2 or ns > k3 or ni < k1 - (aftermid - total):
                        continue
                    for fs, (w, _) in entry.items():
                        if v in fs:
                            continue
                        put(layer, (ni, nj, ns, v), fs | {v}, add_weights(w, weights[(u, v)]),
                            (total - 1, (i, j, s, u), fs, v))
        for key in sorted(layer):
            i, j, s, _ = key
            parts = (PartitionPart(L_t, k1, i, tradeoffs.cl),
                     PartitionPart(R_t, k2, j, tradeoffs.cr),
                     PartitionPart(E3_t, k3, s, tradeoffs.c1))
            layer[key] = reduce_entry(layer[key], parts)
        if audit:
            audit_layer(layer, "N")
        layers[total] = layer

    # ---- phase K: late pieces; L nodes leave the stored sets --------------
    c_grid = _interpolation_grid(tradeoffs.c1, tradeoffs.c2, Fraction(1, inst.inv_eps))
    for total in range(aftermid + 1, final_total + 1):
        layer = {}
        rel = total - aftermid
        piece = (rel - 1) // piece_len + 1
        start_of_piece = rel == (piece - 1) * piece_len + 1
        if total == aftermid + 1:
            prev = layers[total - 1]
            head = inst.r1[0]
            for key, entry in prev.items():
                i, j, s, u = key
                if i != k1 or (u, inst.vr) not in weights:
                    continue
                bridge = weights[(u, inst.vr)]
                for v in sorted(out[head]):
                    if v in L or v in endp:
                        continue
                    dj = 1 if v in R else 0
                    nj, ns = j + dj, s + (1 - dj)
                    if nj > k2 or ns > k3 or not k_bound_ok(1, nj):
                        continue
                    for fs, (w, _) in entry.items():
                        if v in fs:
                            continue
                        put(layer, (nj, ns, v), (fs - L) | {v},
                            add_weights(add_weights(w, bridge), weights[(head, v)]),
                            (total - 1, key, fs, v))
        elif start_of_piece:
            prev = layers[total - 1]
            tail = inst.r2[piece - 2]
            head = inst.r1[piece - 1]
            for (j, s, u), entry in prev.items():
                if (u, tail) not in weights:
                    continue
                bridge = weights[(u, tail)]
                for v in sorted(out[head]):
                    if v in L or v in endp:
                        continue
                    dj = 1 if v in R else 0
                    nj, ns = j + dj, s + (1 - dj)
                    if nj > k2 or ns > k3 or not k_bound_ok(piece, nj):
                        continue
                    for fs, (w, _) in entry.items():
                        if v in fs:
                            continue
                        put(layer, (nj, ns, v), fs | {v},
                            add_weights(add_weights(w, bridge), weights[(head, v)]),
                            (total - 1, (j, s, u), fs, v))
        else:
            prev = layers[total - 1]
            for (j, s, u), entry in prev.items():
                for v in sorted(out[u]):
                    if v in L or v in endp:
                        continue
                    dj = 1 if v in R else 0
                    nj, ns = j + dj, s + (1 - dj)
                    if nj > k2 or ns > k3 or not k_bound_ok(piece, nj):
                        continue
                    for fs, (w, _) in entry.items():
                        if v in fs:
                            continue
                        put(layer, (nj, ns, v), fs | {v}, add_weights(w, weights[(u, v)]),
                            (total - 1, (j, s, u), fs, v))
        for key in sorted(layer):
            j, s, _ = key
            parts = (PartitionPart(R_t, k2, j, tradeoffs.cr),
                     PartitionPart(E3_t, k3, s, tradeoffs.c2))
            if total == aftermid + 1:
                entry = layer[key]
                for c in c_grid:
                    parts_c = (PartitionPart(R_t, k2, j, tradeoffs.cr),
                               PartitionPart(E3_t, k3, s, c))
                    entry = reduce_entry(entry, parts_c)
                layer[key] = entry
            else:
                layer[key] = reduce_entry(layer[key], parts)
        if audit:
            audit_layer(layer, "K")
        layers[total] = layer

    # ---- acceptance --------------------------------------------------------
    tail = inst.r2[m - mt - 1]
    candidates = []
    final_layer = layers.get(final_total, {})
    for (j, s, v), entry in final_layer.items():
        if j != k2 or s != k3 or (v, tail) not in weights:
            continue
        closing = weights[(v, tail)]
        for fs, (w, _) in entry.items():
            totalw = add_weights(w, closing)
            if totalw <= inst.W:
                candidates.append((totalw, (j, s, v), fs))
    if not candidates:
        return KcwpResult(False)
    candidates.sort(key=lambda t: (t[0], t[1], sorted(t[2])))

    def rebuild(entry_key, fs) -> tuple[tuple[int, ...], ...]:
        nodes: list[int] = []
        total, key, cur = final_total, entry_key, fs
        while True:
            _, payload = layers[total][key][cur]
            prev_total, prev_key, prev_fs, added = payload
            nodes.append(added)
            if prev_total is None:
                break
            total, key, cur = prev_total, prev_key, prev_fs
        nodes.reverse()
        pieces = []
        pos = 0
        for idx in range(m + mt):
            chunk = nodes[pos: pos + piece_len]
            pieces.append((inst.l1[idx],) + tuple(chunk) + (inst.l2[idx],))
            pos += piece_len
        chunk = nodes[pos: pos + mid]
        pieces.append((inst.vl,) + tuple(chunk) + (inst.vr,))
        pos += mid
        for idx in range(m - mt):
            chunk = nodes[pos: pos + piece_len]
            pieces.append((inst.r1[idx],) + tuple(chunk) + (inst.r2[idx],))
            pos += piece_len
        return tuple(pieces)

    for totalw, key, fs in candidates:
        pieces = rebuild(key, fs)
        if chain_pieces(inst, pieces) is not None:
            return KcwpResult(True, pieces, totalw, True)
    totalw, key, fs = candidates[0]
    return KcwpResult(True, rebuild(key, fs), totalw, False)


def _interpolation_grid(c1: float, c2: float, eps: Fraction) -> list[float]:
    """Tradeoff sweep grid from c1 down to c2; the step is rounded to the
    nearest value that divides the interval evenly."""
    if c1 <= c2:
        return [c2]
    steps = max(1, round((c1 - c2) / float(eps)))
    width = (c1 - c2) / steps
    return [c1 - width * i for i in range(1, steps + 1)]


def verify_kcwp_witness(inst: KcwpInstance, result: KcwpResult) -> None:
    """Re-check an accepted piece tuple against every stated condition."""
    if not result.accept:
        raise ParameterError("cannot verify a reject")
    par = inst.params()
    g = inst.digraph
    weights = g.arc_weights()
    endp = set(inst.l1) | set(inst.l2) | set(inst.r1) | set(inst.r2) | {inst.vl, inst.vr}
    L, R = set(inst.L), set(inst.R)
    pieces = result.pieces
    if len(pieces) != inst.inv_eps:
        raise FptMixError("wrong piece count")
    lengths = [par.ek - 1] * (par.m + par.mt) + [par.mid] + [par.ek - 1] * (par.m - par.mt)
    starts = list(inst.l1) + [inst.vl] + list(inst.r1)
    ends = list(inst.l2) + [inst.vr] + list(inst.r2)
    used: set[int] = set()
    total = 0
    l_count = r_count = 0
    l_cum: list[int] = []
    r_cum: list[int] = []
    for idx, piece in enumerate(pieces):
        if piece[0] != starts[idx] or piece[-1] != ends[idx]:
            raise FptMixError(f"piece {idx} endpoints mismatch")
        internals = piece[1:-1]
        if len(internals) != lengths[idx]:
            raise FptMixError(f"piece {idx} internal count mismatch")
        if len(set(piece)) != len(piece):
            raise FptMixError(f"piece {idx} is not a simple path")
        for a, b in zip(piece, piece[1:]):
            if (a, b) not in weights:
                raise FptMixError(f"piece {idx} uses missing arc {(a, b)}")
            total = add_weights(total, weights[(a, b)])
        for v in internals:
            if v in endp:
                raise FptMixError(f"internal node {v} is a piece endpoint")
            if v in used:
                raise FptMixError(f"internal node {v} reused")
            used.add(v)
            if v in L:
                if idx > par.m + par.mt:
                    raise FptMixError("L node inside a late piece")
                l_count += 1
            if v in R:
                if idx < par.m + par.mt:
                    raise FptMixError("R node inside an early piece")
                r_count += 1
        if idx < par.m + par.mt:
            l_cum.append(l_count)
        if idx >= par.m + par.mt:
            r_cum.append(r_count)
    if l_count != par.k1 or r_count != par.k2:
        raise FptMixError("blue node budgets not met exactly")
    for i, cnt in enumerate(l_cum, start=1):
        if Fraction(cnt) < Fraction(i, par.m + par.mt) * (par.k1 - par.mid):
            raise FptMixError(f"cumulative L bound violated after early piece {i}")
    for i, cnt in enumerate(r_cum[1:], start=1):  # r_cum[0] covers the middle piece
        if Fraction(cnt) > Fraction(i, par.m - par.mt) * (par.k2 - par.mid) + par.mid:
            raise FptMixError(f"cumulative R bound violated after late piece {i}")
    if total > inst.W or total != result.weight:
        raise FptMixError("witness weight mismatch")


def chain_pieces(inst: KcwpInstance, pieces) -> tuple[int, ...] | None:
    """Glue pieces end-to-start; returns the full node sequence when they
    form one simple directed path on k nodes, else None."""
    starts = {p[0]: i for i, p in enumerate(pieces)}
    ends = {p[-1] for p in pieces}
    heads = [p[0] for p in pieces if p[0] not in ends]
    if len(heads) != 1:
        return None
    seq: list[int] = []
    idx = starts[heads[0]]
    seen = set()
    while True:
        seen.add(idx)
        piece = pieces[idx]
        seq.extend(piece if not seq else piece[1:])
        nxt = starts.get(piece[-1])
        if nxt is None:
            break
        if nxt in seen:
            return None
        idx = nxt
    if len(seen) != len(pieces) or len(seq) != inst.k or len(set(seq)) != inst.k:
        return None
    return tuple(seq)


def construct_kcwp_witness(g: Digraph, known_path, inv_eps: int, delta: Fraction,
                           gamma: Fraction, W: int | None = None) -> KcwpInstance:
    """Build an accepting cut instance from a known simple k-node path.

    Follows the completeness construction: positional cut nodes, a threshold
    node capturing exactly the blue budget, the blue-heaviest candidate as
    the middle piece, a pigeonhole split of the remaining pieces (searched
    exhaustively over partitions, descending/ascending blue order), and L, R
    taken directly as the blue parts.
    """
    path = tuple(known_path)
    k = len(path)
    if len(set(path)) != k:
        raise ParameterError("known path is not simple")
    weights = g.arc_weights()
    total = 0
    for a, b in zip(path, path[1:]):
        if (a, b) not in weights:
            raise ParameterError(f"known path uses missing arc {(a, b)}")
        total = add_weights(total, weights[(a, b)])
    par = kcwp_params(k, inv_eps, delta, gamma)
    if par.ek - 1 < 1 or par.mid < 1:
        raise ParameterError("k too small for the requested eps")
    m, mt, ek, k1, k2, mid = par.m, par.mt, par.ek, par.k1, par.k2, par.mid
    rem = par.kt - inv_eps * ek

    # positional boundary set: starts of all candidate pieces plus their ends
    starts_pos = [(j - 1) * ek + 1 for j in range(1, inv_eps + 1)]
    ends_pos = [j * ek + rem + 1 for j in range(1, inv_eps + 1)]
    u_big = {path[p - 1] for p in starts_pos} | {path[p - 1] for p in ends_pos} | {path[k - 1]}

    blue_budget = k1 + k2
    free_on_path = [v for v in path if v not in u_big]
    if blue_budget > len(free_on_path):
        raise ParameterError("k too small to supply the blue budget")
    # threshold scan: nodes with index >= i, outside the boundary set
    vstar: set[int] = set()
    for i in range(g.node_count, -1, -1):
        vstar = {v for v in range(i, g.node_count)} - u_big
        if len(vstar.intersection(path)) == blue_budget:
            break
    if len(vstar.intersection(path)) != blue_budget:
        raise ParameterError("no threshold captures the blue budget exactly")

    def span_nodes(lo: int, hi: int) -> tuple[int, ...]:
        return tuple(path[p - 1] for p in range(lo, hi + 1))

    candidates = [(span_nodes(starts_pos[j], ends_pos[j]), j) for j in range(inv_eps)]
    blue_of = lambda nodes: sum(1 for v in nodes if v in vstar)
    best_blue = max(blue_of(nodes) for nodes, _ in candidates)
    mid_nodes, jstar = next((nodes, j) for nodes, j in candidates if blue_of(nodes) == best_blue)

    small: list[tuple[int, ...]] = []
    for i in range(jstar):
        small.append(span_nodes(i * ek + 1, (i + 1) * ek + 1))
    vr_pos = ends_pos[jstar]
    for i in range(inv_eps - 1 - jstar):
        small.append(span_nodes(vr_pos + i * ek, vr_pos + (i + 1) * ek))
    assert len(small) == 2 * m

    mid_blue = [v for v in mid_nodes[1:-1] if v in vstar]
    piece_blue = [blue_of(p[1:-1]) for p in small]

    for left_idx in combinations(range(2 * m), m + mt):
        right_idx = [i for i in range(2 * m) if i not in left_idx]
        sum_l = sum(piece_blue[i] for i in left_idx)
        sum_r = sum(piece_blue[i] for i in right_idx)
        if sum_l > k1 or sum_r > k2 or k1 - sum_l > len(mid_blue):
            continue
        left = sorted(left_idx, key=lambda i: (-piece_blue[i], i))
        right = sorted(right_idx, key=lambda i: (piece_blue[i], i))
        l_mid = set(mid_blue[: k1 - sum_l])
        Lset = {v for i in left_idx for v in small[i][1:-1] if v in vstar} | l_mid
        Rset = {v for i in right_idx for v in small[i][1:-1] if v in vstar} | \
               (set(mid_blue) - l_mid)
        inst = KcwpInstance(
            g, total if W is None else W, k, inv_eps, Fraction(delta), Fraction(gamma),
            frozenset(Lset), frozenset(Rset),
            tuple(small[i][0] for i in left), tuple(small[i][-1] for i in left),
            tuple(small[i][0] for i in right), tuple(small[i][-1] for i in right),
            mid_nodes[0], mid_nodes[-1])
        if not validate_kcwp(inst).valid:
            continue
        pieces = tuple(small[i] for i in left) + (mid_nodes,) + tuple(small[i] for i in right)
        if _pieces_satisfy(inst, pieces):
            return inst
    raise FptMixError("no piece partition satisfies the budgets (unexpected)")


def _pieces_satisfy(inst: KcwpInstance, pieces) -> bool:
    try:
        total = 0
        weights = inst.digraph.arc_weights()
        for piece in pieces:
            for a, b in zip(piece, piece[1:]):
                total = add_weights(total, weights[(a, b)])
        verify_kcwp_witness(inst, KcwpResult(True, pieces, total))
        return total <= inst.W
    except FptMixError:
        return False


@dataclass(frozen=True)
class PathAlgResult:
    status: str  # accept | reject | budget-exceeded
    path: tuple[int, ...] | None = None
    weight: int | None = None


def best_kpath(g: Digraph, k: int):
    """Exhaustive minimum-weight simple k-node path, with the path itself."""
    if k <= 0:
        return None
    if k == 1:
        return (0, (0,)) if g.node_count else None
    out = g.out_neighbors()
    weights = g.arc_weights()
    best: list = [None]

    def extend(v, trail, total):
        if len(trail) == k:
            if best[0] is None or total < best[0][0]:
                best[0] = (total, tuple(trail))
            return
        for u in sorted(out[v]):
            if u not in trail:
                trail.append(u)
                extend(u, trail, add_weights(total, weights[(v, u)]))
                trail.pop()

    for start in range(g.node_count):
        extend(start, [start], 0)
    return best[0]


def path_alg(g: Digraph, W: int, k: int, inv_eps: int = 13,
             delta: Fraction = Fraction(1, 12), gamma: Fraction = Fraction(84, 1000),
             tradeoffs: KcwpTradeoffs | None = None,
             budget: int = 100_000) -> PathAlgResult:
    """Full driver: universal-set colorings, cut-node subsets, threshold
    index, endpoint-map tuples, legality check, inner cut solver.

    Small k (below the regime where pieces have an internal node) falls back
    to exhaustive search; the enumeration is budget-counted per tuple and
    reports budget-exceeded honestly instead of running for geological time.
    """
    tradeoffs = tradeoffs or KcwpTradeoffs()
    par = kcwp_params(k, inv_eps, delta, gamma)
    n = g.node_count
    if budget <= 0:
        return PathAlgResult("budget-exceeded")
    if n < k:
        return PathAlgResult("reject")
    if k < 2 * inv_eps + 1:
        got = best_kpath(g, k)
        if got is not None and got[0] <= W:
            return PathAlgResult("accept", got[1], got[0])
        return PathAlgResult("reject")

    spent = 0
    cut_size = inv_eps + 1
    try:
        colorings = unisets.build_universal(n, par.k1 + par.k2, par.k2, mode="greedy")
    except BudgetExceededError:
        return PathAlgResult("budget-exceeded")
    m_plus, m_minus = par.m + par.mt, par.m - par.mt
    for f in colorings.functions:
        for u_nodes in combinations(range(n), cut_size):
            u_set = set(u_nodes)
            for i in range(n):
                spent += 1
                if spent > budget:
                    return PathAlgResult("budget-exceeded")
                Lset = frozenset(v for v in range(i, n) if v not in u_set and not (f >> v) & 1)
                Rset = frozenset(v for v in range(i, n) if v not in u_set and (f >> v) & 1)
                slots = 2 * m_plus + 2 * m_minus + 2
                for combo in product(u_nodes, repeat=slots):
                    spent += 1
                    if spent > budget:
                        return PathAlgResult("budget-exceeded")
                    l1 = combo[:m_plus]
                    l2 = combo[m_plus: 2 * m_plus]
                    r1 = combo[2 * m_plus: 2 * m_plus + m_minus]
                    r2 = combo[2 * m_plus + m_minus: 2 * m_plus + 2 * m_minus]
                    vl, vr = combo[-2], combo[-1]
                    try:
                        inst = KcwpInstance(g, W, k, inv_eps, Fraction(delta),
                                            Fraction(gamma), Lset, Rset,
                                            l1, l2, r1, r2, vl, vr)
                    except ParameterError:
                        continue
                    if not validate_kcwp(inst).valid:
                        continue
                    res = solve_kcwp(inst, tradeoffs)
                    if res.accept:
                        seq = chain_pieces(inst, res.pieces)
                        if seq is not None:
                            return PathAlgResult("accept", seq, res.weight)
    return PathAlgResult("reject")
