"""P2-packing: k node-disjoint 3-node paths, via iterative compression.

Round t receives a (t-1)-packing whose nodes form the set X.  A guaranteed
t-packing (if any exists) keeps most of its nodes inside X, so the round
splits it by (p, q): p nodes outside X spread over q paths.  One procedure
computes, per (p, q), a family of candidate X-footprints of those q paths
(a representative-family DP over the outside nodes); a second decides
whether some candidate footprint leaves room for the remaining k - q paths
inside X, using the same unbalanced cutting as the weighted packing solver
but with a plain boolean table over explicit partial-solution sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .core import (
    BudgetExceededError,
    Graph,
    OrderedUniverse,
    ParameterError,
    WeightedSetFamily,
    block_permutation,
    reorder_universe,
)
from .repsets import PartitionPart, PartitionSpec, select_representative_positions
from .wsp import cut_tuples


def _ceildiv(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class Packing:
    paths: tuple[tuple[int, int, int], ...]  # (end, mid, end) with both edges present

    def __len__(self) -> int:
        return len(self.paths)

    def nodes(self) -> set[int]:
        return {v for p in self.paths for v in p}


def validate_packing(g: Graph, packing: Packing) -> None:
    adj = g.adjacency()
    used: set[int] = set()
    for a, b, c in packing.paths:
        if len({a, b, c}) != 3 or a not in adj[b] or c not in adj[b]:
            raise ParameterError(f"triple {(a, b, c)} is not a 3-node path")
        if used.intersection((a, b, c)):
            raise ParameterError("packing paths are not node-disjoint")
        used.update((a, b, c))


@dataclass(frozen=True)
class IcpInstance:
    graph: Graph
    k: int
    previous: Packing

    def __post_init__(self):
        if len(self.previous) != self.k - 1:
            raise ParameterError("compression step needs a (k-1)-packing")
        validate_packing(self.graph, self.previous)


def _all_triples(g: Graph):
    adj = g.adjacency()
    for mid in range(g.node_count):
        for a, c in combinations(sorted(adj[mid]), 2):
            yield (a, mid, c)


def icp_pro1(inst: IcpInstance, p: int, q: int, c: float = 1.0) -> dict[frozenset, Packing]:
    """Candidate X-footprints of the q paths that leave X.

    Returns a map from each surviving (3q - p)-subset of X to one q-packing
    realizing it.  DP over the outside nodes in ascending order: paths enter
    ordered by their smallest outside node, which is dropped from the stored
    set; families are (p - p')-reduced after every entry.
    """
    x_nodes = sorted(inst.previous.nodes())
    x_set = set(x_nodes)
    y_nodes = [v for v in range(inst.graph.node_count) if v not in x_set]
    y_index = {v: i for i, v in enumerate(y_nodes)}
    y_universe = OrderedUniverse.from_labels(str(v) for v in y_nodes)

    paths = []
    for a, mid, cc in _all_triples(inst.graph):
        ypart = frozenset(y_index[v] for v in (a, mid, cc) if v not in x_set)
        if not ypart:
            continue
        xpart = frozenset(v for v in (a, mid, cc) if v in x_set)
        paths.append((min(ypart), ypart, xpart, (a, mid, cc)))
    paths.sort(key=lambda t: (t[0], t[3]))

    # layers[(p', q')][(m, X')] -> {stored Y-set: payload}
    layers: dict[tuple[int, int], dict] = {}

    def reduce_entry(entry: dict, size: int, p_used: int) -> dict:
        if len(entry) <= 1:
            return entry
        ordered = sorted(entry.items(), key=lambda kv: sorted(kv[0]))
        sets = tuple((tuple(sorted(fs)), 0) for fs, _ in ordered)
        wsf = WeightedSetFamily(y_universe, size, sets, "max")
        spec = PartitionSpec(
            (PartitionPart(tuple(range(len(y_nodes))), size + (p - p_used), size, c),))
        keep, _ = select_representative_positions(spec, wsf, "max")
        return {ordered[i][0]: entry[ordered[i][0]] for i in keep}

    for p_used in range(1, p + 1):
        for q_used in range(_ceildiv(p_used, 3), min(p_used, q) + 1):
            layer: dict = {}
            for m, ypart, xpart, triple in paths:
                if len(ypart) > p_used:
                    continue
                stored_new = ypart - {m}
                if q_used == 1:
                    if len(ypart) != p_used:
                        continue
                    entry = layer.setdefault((m, xpart), {})
                    entry.setdefault(stored_new, (None, None, None, triple))
                else:
                    child_layer = layers.get((p_used - len(ypart), q_used - 1))
                    if not child_layer:
                        continue
                    for (m2, x2), entry2 in child_layer.items():
                        if m2 >= m or x2 & xpart:
                            continue
                        for fs2 in entry2:
                            if fs2 & ypart:
                                continue
                            key = (m, x2 | xpart)
                            entry = layer.setdefault(key, {})
                            entry.setdefault(fs2 | stored_new,
                                             ((p_used - len(ypart), q_used - 1), (m2, x2), fs2, triple))
            for key in sorted(layer, key=lambda kv: (kv[0], sorted(kv[1]))):
                layer[key] = reduce_entry(layer[key], p_used - q_used, p_used)
            layers[(p_used, q_used)] = layer

    result: dict[frozenset, Packing] = {}
    final = layers.get((p, q), {})
    for (m, xpart), entry in sorted(final.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]))):
        if xpart in result:
            continue
        fs = sorted(entry, key=sorted)[0]
        triples = []
        lk, key, cur = (p, q), (m, xpart), fs
        while True:
            child_lk, child_key, child_fs, triple = layers[lk][key][cur]
            triples.append(triple)
            if child_lk is None:
                break
            lk, key, cur = child_lk, child_key, child_fs
        result[xpart] = Packing(tuple(reversed(triples)))
    return result


@dataclass(frozen=True)
class Pro2Instance:
    universe: OrderedUniverse
    k: int
    family: tuple[tuple[int, int, int], ...]  # 3-sets as sorted index triples
    p: int
    q: int
    candidates: tuple[frozenset, ...]
    inv_eps: int
    f: tuple[int, ...] | None = None

    def __post_init__(self):
        want = 3 * self.q - self.p
        for cand in self.candidates:
            if len(cand) != want:
                raise ParameterError(f"candidate footprint of size {len(cand)}, expected {want}")


def _r_schedule_pro2(kq: int, p: int, q: int, inv_eps: int) -> list[int]:
    ek = kq // inv_eps
    if ek < 1:
        raise ParameterError("floor(eps * (k - q)) must be at least 1")
    values = [0]
    for j in range(1, inv_eps + 1):
        denom = _ceildiv(3 * (kq - (j - 1) * ek), ek)
        values.append(values[-1] + _ceildiv((3 * q - p) + 2 * (j - 1) * ek - values[-1], denom))
    return values


@dataclass(frozen=True)
class Cpro2Result:
    accept: bool
    footprint: frozenset | None = None
    ordered_sets: tuple[int, ...] | None = None  # positions into inst.family


def solve_cpro2(inst: Pro2Instance, budget: int = 5_000_000) -> Cpro2Result:
    """Boolean staged DP with explicit partial-solution sets.

    Mirrors the weighted cut packing solver, except entries carry the exact
    set of still-relevant elements (chosen footprint plus non-minimum set
    elements above the last stage threshold), so no representative reduction
    is involved.  A companion table per stage boundary applies the threshold
    deletion before the next stage reads it.  ``budget`` caps the number of
    materialized entries; explicit subsets can multiply out on adversarial
    inputs.
    """
    if inst.f is None:
        raise ParameterError("the cut subproblem needs the stage function f")
    spent = 0
    rank = inst.universe.rank
    kq = inst.k - inst.q
    t = inst.inv_eps
    if kq < 1:
        raise ParameterError("k - q must be at least 1 for the staged table")
    ek = kq // t
    sched = _r_schedule_pro2(kq, inst.p, inst.q, t)
    f_rank = [rank[e] for e in inst.f]

    sets_sorted = []
    for pos, members in enumerate(inst.family):
        mn = min(members, key=lambda e: rank[e])
        others = frozenset(m for m in members if m != mn)
        contrib = tuple(sum(1 for e in others if rank[e] <= f_rank[l]) for l in range(t))
        sets_sorted.append((rank[mn], pos, contrib, others, frozenset(members)))
    sets_sorted.sort()

    def strip(fs: frozenset, floor: int) -> frozenset:
        return frozenset(e for e in fs if rank[e] > floor)

    m_layers: dict[tuple[int, int], dict] = {}
    n_tables: dict[int, dict] = {}

    for i in range(1, t + 2):
        j_lo = 1 + (i - 1) * ek
        j_hi = i * ek if i <= t else kq
        floor_i = f_rank[i - 2] if i >= 2 else -1
        for j in range(j_lo, min(j_hi, kq) + 1):
            layer: dict = {}
            if j == 1:
                for ci, cand in enumerate(inst.candidates):
                    cand_contrib = tuple(sum(1 for e in cand if rank[e] <= f_rank[l])
                                         for l in range(t))
                    for mrank, pos, contrib, others, full in sets_sorted:
                        if cand & full:
                            continue
                        s_vec = tuple(a + b for a, b in zip(cand_contrib, contrib))
                        u_prime = cand | others
                        key = (s_vec, mrank, u_prime)
                        spent += 1
                        if spent > budget:
                            raise BudgetExceededError("cut packing table budget exceeded")
                        layer.setdefault(key, ("base", ci, pos))
            else:
                if j == j_lo and i >= 2:
                    source = n_tables.get(i - 1, {})
                    for (s_vec, mrank_c, a) in source:
                        for mrank, pos, contrib, others, full in sets_sorted:
                            if mrank <= mrank_c or mrank <= floor_i:
                                continue
                            if a & full:
                                continue
                            new_s = tuple(x + y for x, y in zip(s_vec, contrib))
                            if any(new_s[l] < sched[l + 1] for l in range(i - 1)):
                                continue
                            key = (new_s, mrank, a | others)
                            spent += 1
                            if spent > budget:
                                raise BudgetExceededError("cut packing table budget exceeded")
                            layer.setdefault(key, ("n", i - 1, (s_vec, mrank_c, a), pos))
                else:
                    source = m_layers.get((i, j - 1), {})
                    for (s_vec, mrank_c, a) in source:
                        for mrank, pos, contrib, others, full in sets_sorted:
                            if mrank <= mrank_c or mrank <= floor_i:
                                continue
                            if a & full:
                                continue
                            new_s = tuple(x + y for x, y in zip(s_vec, contrib))
                            if any(new_s[l] < sched[l + 1] for l in range(i - 1)):
                                continue
                            key = (new_s, mrank, a | others)
                            spent += 1
                            if spent > budget:
                                raise BudgetExceededError("cut packing table budget exceeded")
                            layer.setdefault(key, ("m", (i, j - 1), (s_vec, mrank_c, a), pos))
            m_layers[(i, j)] = layer
            if i <= t and j == i * ek:
                table = n_tables.setdefault(i, {})
                for (s_vec, mrank, u_prime) in layer:
                    stripped = strip(u_prime, f_rank[i - 1])
                    table.setdefault((s_vec, mrank, stripped), (s_vec, mrank, u_prime))

    for i in range(1, t + 2):
        layer = m_layers.get((i, kq), {})
        for key in sorted(layer, key=lambda kv: (kv[0], kv[1], sorted(kv[2]))):
            s_vec = key[0]
            if any(s_vec[l] < sched[l + 1] for l in range(t)):
                continue
            positions = []
            lk, cur = (i, kq), key
            while True:
                payload = m_layers[lk][cur]
                if payload[0] == "base":
                    positions.append(payload[2])
                    footprint = inst.candidates[payload[1]]
                    break
                if payload[0] == "n":
                    positions.append(payload[3])
                    stage = payload[1]
                    m_key = n_tables[stage][payload[2]]
                    lk, cur = (stage, stage * ek), m_key
                else:
                    positions.append(payload[3])
                    lk, cur = payload[1], payload[2]
            positions.reverse()
            return Cpro2Result(True, footprint, tuple(positions))
    return Cpro2Result(False)


@dataclass(frozen=True)
class Pro2Result:
    status: str  # accept | reject | budget-exceeded
    footprint: frozenset | None = None
    ordered_sets: tuple[int, ...] | None = None


def procedure2(inst: Pro2Instance, budget: int = 200_000) -> Pro2Result:
    """Unbalanced-cutting driver for the footprint-avoiding packing decision."""
    kq = inst.k - inst.q
    if kq < 0:
        return Pro2Result("reject")
    if kq == 0:
        # empty subfamily: any candidate footprint works
        if inst.candidates:
            return Pro2Result("accept", inst.candidates[0], ())
        return Pro2Result("reject")
    inv_eps = inst.inv_eps
    if kq // inv_eps < 1:
        inv_eps = 1
    universe = inst.universe
    order = universe.by_rank()
    n = len(order)
    if n < inv_eps:
        return Pro2Result("reject")
    seen: set[tuple] = set()
    spent = 0
    for cut in cut_tuples(order, inv_eps):
        spent += 1
        if spent > budget:
            return Pro2Result("budget-exceeded")
        blocks: list[tuple[int, ...]] = []
        usedr: set[int] = set()
        for lo, hi in cut:
            block = tuple(order[r] for r in range(lo, hi + 1) if r not in usedr)
            usedr.update(range(lo, hi + 1))
            if not block:
                blocks = []
                break
            blocks.append(block)
        if not blocks:
            continue
        key = tuple(blocks)
        if key in seen:
            continue
        seen.add(key)
        perm = block_permutation(universe, blocks)
        uni2 = reorder_universe(universe, perm)
        f = tuple(max(b, key=lambda e: uni2.rank[e]) for b in blocks)
        sub = Pro2Instance(uni2, inst.k, inst.family, inst.p, inst.q,
                           inst.candidates, inv_eps, f)
        try:
            res = solve_cpro2(sub)
        except BudgetExceededError:
            return Pro2Result("budget-exceeded")
        if res.accept:
            return Pro2Result("accept", res.footprint, res.ordered_sets)
    return Pro2Result("reject")


@dataclass(frozen=True)
class P2Result:
    status: str  # accept | reject | budget-exceeded
    packing: Packing | None = None


def solve_p2packing(g: Graph, k: int, inv_eps: int = 2, c: float = 1.0,
                    budget: int = 200_000) -> P2Result:
    """Iterative compression: grow a packing one path at a time.

    Each round tries every (p, q) split sanctioned by the containment
    guarantee for packings extending the previous round's witness, combining
    the footprint family with the in-X packing decision; the reconstructed
    t-packing feeds the next round.
    """
    if k < 0:
        raise ParameterError("k must be non-negative")
    if inv_eps < 1 or inv_eps > 6:
        raise ParameterError("1/eps must be in 1..6")
    current = Packing(())
    for t in range(1, k + 1):
        inst = IcpInstance(g, t, current)
        x_nodes = sorted(current.nodes())
        x_index = {v: i for i, v in enumerate(x_nodes)}
        p_cap = 3 * t - _ceildiv(5 * (t - 1), 2)
        triples_in_x = []
        for a, mid, cc in _all_triples(g):
            if a in x_index and mid in x_index and cc in x_index:
                triples_in_x.append((a, mid, cc))
        x_universe = OrderedUniverse.from_labels(str(v) for v in x_nodes)
        family = tuple(tuple(sorted(x_index[v] for v in tr)) for tr in triples_in_x)
        found: Packing | None = None
        for p in range(3, p_cap + 1):
            for q in range(_ceildiv(p, 3), min(p, t) + 1):
                try:
                    fmap = icp_pro1(inst, p, q, c)
                except BudgetExceededError:
                    return P2Result("budget-exceeded")
                if not fmap:
                    continue
                cands = tuple(frozenset(x_index[v] for v in fs)
                              for fs in sorted(fmap, key=sorted))
                sub = Pro2Instance(x_universe, t, family, p, q, cands, inv_eps)
                res = procedure2(sub, budget)
                if res.status == "budget-exceeded":
                    return P2Result("budget-exceeded")
                if res.status == "accept":
                    foot = frozenset(x_nodes[i] for i in res.footprint)
                    outside = fmap[foot]
                    inside = tuple(triples_in_x[pos] for pos in res.ordered_sets)
                    found = Packing(tuple(outside.paths) + inside)
                    validate_packing(g, found)
                    break
            if found is not None:
                break
        if found is None:
            return P2Result("reject")
        current = found
    return P2Result("accept", current)
