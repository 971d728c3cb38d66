"""Weighted 3-set k-packing via unbalanced cutting.

The cut subproblem asks for an ordered packing: sets inserted in increasing
order of their smallest element, where a staged threshold function licenses
deleting every element below it from partial solutions, and a deletion
schedule R prescribes how many non-minimum elements each stage must shed.
The driver enumerates every way to cut the universe into consecutive pieces,
reorders the universe so the pieces come first, and hands the induced
threshold function to the cut solver.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    BudgetExceededError,
    OrderedUniverse,
    ParameterError,
    WeightedSetFamily,
    add_weights,
    block_permutation,
    reorder_universe,
)
from .repsets import PartitionPart, PartitionSpec, select_representative_positions


def _ceildiv(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class DeletionSchedule:
    values: tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if len(v) < 2 or v[0] != 0 or v[1] != 0:
            raise ParameterError("schedule must start with R(0) = R(1) = 0")
        if any(v[i] > v[i + 1] for i in range(len(v) - 1)):
            raise ParameterError("schedule must be non-decreasing")


def deletion_schedule(k: int, inv_eps: int) -> DeletionSchedule:
    """Exact integer evaluation of the stage-deletion recursion."""
    if inv_eps < 1:
        raise ParameterError("1/eps must be a positive integer")
    ek = k // inv_eps
    if ek < 1:
        raise ParameterError("floor(eps * k) must be at least 1")
    values = [0, 0]
    for j in range(2, inv_eps + 1):
        denom = _ceildiv(3 * (k - (j - 1) * ek), ek)
        values.append(values[-1] + _ceildiv(2 * (j - 1) * ek - values[-1], denom))
    return DeletionSchedule(tuple(values))


@dataclass(frozen=True)
class CwspInstance:
    universe: OrderedUniverse
    family: WeightedSetFamily
    W: int
    k: int
    inv_eps: int
    f: tuple[int, ...]

    def __post_init__(self):
        if self.family.set_size != 3:
            raise ParameterError("family must consist of 3-sets")
        if self.inv_eps < 1:
            raise ParameterError("1/eps must be a positive integer")
        if len(self.f) != self.inv_eps:
            raise ParameterError("f must assign one element per stage")
        ranks = [self.universe.rank[e] for e in self.f]
        if any(ranks[i] > ranks[i + 1] for i in range(len(ranks) - 1)):
            raise ParameterError("f must be non-decreasing in the universe order")


@dataclass(frozen=True)
class CwspResult:
    accept: bool
    ordered_sets: tuple[int, ...] | None = None  # positions into family.sets
    weight: int | None = None


def solve_cwsp(inst: CwspInstance, c: float = 1.0, reduce: bool = True,
               trace: dict | None = None, audit: bool = False) -> CwspResult:
    """Staged dynamic program over ordered packings.

    Entries are keyed by (stage, sets used, per-stage deletable counts,
    smallest element of the last set); stored member sets hold only non-
    minimum elements above the previous stage threshold.  After every entry
    the family is replaced by a max 3(k - j)-representative subfamily unless
    ``reduce`` is off (the A/B soundness mode).
    """
    if inst.k < 1:
        raise ParameterError("k must be at least 1")
    rank = inst.universe.rank
    n = len(inst.universe)
    k, t = inst.k, inst.inv_eps
    ek = k // t
    sched = deletion_schedule(k, t).values
    f_rank = [rank[e] for e in inst.f]
    fam = inst.family

    def stage_floor(i: int) -> int:
        # every element of a set inserted at stage i must exceed f(i-1)
        return f_rank[i - 2] if i >= 2 else -1

    sets_by_min: list[tuple[int, int, tuple[int, ...], frozenset, int]] = []
    for pos in range(len(fam)):
        members = fam.members(pos)
        mn = min(members, key=lambda e: rank[e])
        others = frozenset(m for m in members if m != mn)
        contrib = tuple(sum(1 for e in others if rank[e] <= f_rank[l]) for l in range(t))
        sets_by_min.append((rank[mn], pos, contrib, others, fam.weight(pos)))
    sets_by_min.sort()

    def strip(fs: frozenset, floor: int) -> frozenset:
        return frozenset(e for e in fs if rank[e] > floor)

    Entry = dict  # {frozenset: (weight, payload)}
    layers: dict[tuple[int, int], dict[tuple, Entry]] = {}

    def reduce_entry(entry: Entry, size: int, j: int) -> Entry:
        if not reduce or len(entry) <= 1:
            return entry
        ordered = sorted(entry.items(), key=lambda kv: sorted(kv[0]))
        sets = tuple((tuple(sorted(fs)), w) for fs, (w, _) in ordered)
        wsf = WeightedSetFamily(inst.universe, size, sets, "max")
        spec = PartitionSpec((PartitionPart(tuple(range(n)), size + 3 * (k - j), size, c),))
        keep, _ = select_representative_positions(spec, wsf, "max")
        kept = {}
        for idx in keep:
            fs = ordered[idx][0]
            kept[fs] = entry[fs]
        if trace is not None:
            trace["peak_family"] = max(trace.get("peak_family", 0), len(entry))
        return kept

    def put(layer, key, fs, weight, payload):
        entry = layer.setdefault(key, {})
        old = entry.get(fs)
        if old is None or weight > old[0]:
            entry[fs] = (weight, payload)

    for i in range(1, t + 2):
        j_lo = 1 + (i - 1) * ek
        j_hi = i * ek if i <= t else k
        for j in range(j_lo, min(j_hi, k) + 1):
            layer: dict[tuple, Entry] = {}
            floor_i = stage_floor(i)
            if j == 1:
                for mrank, pos, contrib, others, w in sets_by_min:
                    if mrank <= floor_i:
                        continue
                    put(layer, (contrib, mrank), others, w, (None, None, None, pos))
            else:
                for ci in (i, i - 1):
                    if ci == i and j - 1 < j_lo:
                        continue
                    if ci == i - 1 and (i == 1 or j - 1 != (i - 1) * ek):
                        continue
                    child_layer = layers.get((ci, j - 1))
                    if not child_layer:
                        continue
                    for (s_vec, mrank_c), entry in child_layer.items():
                        for mrank, pos, contrib, others, w in sets_by_min:
                            if mrank <= mrank_c or mrank <= floor_i:
                                continue
                            new_s = tuple(a + b for a, b in zip(s_vec, contrib))
                            if any(new_s[l] < sched[l + 1] for l in range(i - 1)):
                                continue
                            for fs, (cw, _) in entry.items():
                                a = strip(fs, floor_i) if ci != i else fs
                                # dropped minima and stage-stripped elements all
                                # sort below min(S), so this one check is full
                                # disjointness against the partial solution
                                if any(e in a for e in fam.members(pos)):
                                    continue
                                put(layer, (new_s, mrank), a | others,
                                    add_weights(cw, w), ((ci, j - 1), (s_vec, mrank_c), fs, pos))
            for key in sorted(layer):
                s_vec = key[0]
                size = 2 * j - (s_vec[i - 2] if i >= 2 else 0)
                layer[key] = reduce_entry(layer[key], size, j)
            if audit:
                for (s_vec, mrank), entry in layer.items():
                    floor_i = stage_floor(i)
                    for fs in entry:
                        # element ledger: nothing at or below the last stage
                        # threshold survives, sizes track 2j - s_(i-1), and
                        # the per-stage counts match the coordinates
                        assert all(rank[e] > floor_i for e in fs)
                        assert len(fs) == 2 * j - (s_vec[i - 2] if i >= 2 else 0)
                        base = s_vec[i - 2] if i >= 2 else 0
                        for l in range(max(0, i - 2), t):
                            got = sum(1 for e in fs if rank[e] <= f_rank[l])
                            assert got == s_vec[l] - base, (i, j, s_vec, l)
            layers[(i, j)] = layer

    best: tuple[int, tuple, frozenset] | None = None
    for i in range(1, t + 2):
        layer = layers.get((i, k))
        if not layer:
            continue
        for (s_vec, mrank), entry in layer.items():
            if any(s_vec[l] < sched[l + 1] for l in range(t)):
                continue
            for fs, (w, _) in entry.items():
                if w >= inst.W and (best is None or w > best[0]):
                    best = (w, (i, k, s_vec, mrank), fs)
    if best is None:
        return CwspResult(False)

    weight, (i, j, s_vec, mrank), fs = best
    positions = []
    key = (s_vec, mrank)
    layer_key = (i, j)
    while True:
        _, payload = layers[layer_key][key][fs]
        child_lk, child_key, child_fs, pos = payload
        positions.append(pos)
        if child_lk is None:
            break
        layer_key, key, fs = child_lk, child_key, child_fs
    positions.reverse()
    return CwspResult(True, tuple(positions), weight)


def verify_cwsp_witness(inst: CwspInstance, result: CwspResult) -> None:
    """Re-check an accepted ordered packing against the stated conditions."""
    if not result.accept:
        raise ParameterError("cannot verify a reject")
    fam = inst.family
    rank = inst.universe.rank
    k, t = inst.k, inst.inv_eps
    ek = k // t
    sched = deletion_schedule(k, t).values
    sets = [fam.members(p) for p in result.ordered_sets]
    if len(sets) != k:
        raise ParameterError("witness does not have k sets")
    used: set[int] = set()
    for s in sets:
        if used.intersection(s):
            raise ParameterError("witness sets are not disjoint")
        used.update(s)
    mins = [min(s, key=lambda e: rank[e]) for s in sets]
    if any(rank[mins[i]] >= rank[mins[i + 1]] for i in range(k - 1)):
        raise ParameterError("witness sets are not ordered by smallest element")
    total = 0
    for p in result.ordered_sets:
        total = add_weights(total, fam.weight(p))
    if total != result.weight or total < inst.W:
        raise ParameterError("witness weight mismatch")
    for stage in range(1, t + 1):
        fr = rank[inst.f[stage - 1]]
        upto = min(stage * ek, k)
        deletable = sum(1 for idx in range(upto) for e in sets[idx]
                        if e != mins[idx] and rank[e] <= fr)
        if deletable < sched[stage]:
            raise ParameterError(f"stage {stage} deletion budget unmet")
        for idx in range(upto, k):
            if any(rank[e] <= fr for e in sets[idx]):
                raise ParameterError(f"set after stage {stage} uses a too-small element")


def smallest_element_closure_check(family: WeightedSetFamily, prefix) -> bool:
    """Test oracle for deletion soundness: once a set enters an ordered
    partial solution, sets whose smallest element sits at or beyond the
    largest collected minimum must not touch the collected minima.

    The at-or-beyond reading is what makes the check informative: a family
    set reusing the current minimum element is exactly the boundary case the
    staged insertion has to exclude."""
    rank = family.universe.rank
    mins = {min(family.members(p), key=lambda e: rank[e]) for p in prefix}
    if not mins:
        return True
    top = max(rank[e] for e in mins)
    taken = set(prefix)
    for pos in range(len(family)):
        if pos in taken:
            continue
        members = family.members(pos)
        if min(rank[e] for e in members) >= top and mins.intersection(members):
            return False
    return True


@dataclass(frozen=True)
class WspResult:
    status: str  # accept | reject | budget-exceeded
    packing: tuple[int, ...] | None = None
    weight: int | None = None


def cut_tuples(order: list[int], pieces: int):
    """All choices of `pieces` disjoint (l_i, r_i) rank pairs, l_i <= r_i.

    Singleton spans (l_i = r_i) are included: with floor(eps*k) = 1 the
    completeness construction can need a one-element first piece, which
    strictly-ordered endpoint pairs cannot express.
    """
    from itertools import combinations

    taken: list[tuple[int, int]] = []

    def rec(avail: tuple[int, ...]):
        if len(taken) == pieces:
            yield tuple(taken)
            return
        for single in avail:
            taken.append((single, single))
            rest = tuple(x for x in avail if x != single)
            yield from rec(rest)
            taken.pop()
        for pair in combinations(avail, 2):
            taken.append(pair)
            rest = tuple(x for x in avail if x not in pair)
            yield from rec(rest)
            taken.pop()

    yield from rec(tuple(range(len(order))))


def wsp_alg(universe: OrderedUniverse, family: WeightedSetFamily, W: int, k: int,
            inv_eps: int = 2, c: float = 1.591, budget: int = 200_000,
            reduce: bool = True, trace: dict | None = None) -> WspResult:
    """Unbalanced-cutting driver for weighted 3-set k-packing.

    Enumerates every cut tuple, reorders the universe so the cut pieces come
    first, derives the stage threshold function, and accepts iff some induced
    cut instance accepts.  The enumeration count is budget-capped.
    """
    if k == 0:
        return WspResult("accept" if 0 >= W else "reject", (), 0)
    if k < 0:
        raise ParameterError("k must be non-negative")
    if inv_eps < 1 or inv_eps > 6:
        raise ParameterError("1/eps must be in 1..6")
    if k // inv_eps < 1:
        inv_eps = 1  # staged machinery needs floor(eps*k) >= 1; one stage always works
    order = universe.by_rank()
    n = len(order)
    if n < inv_eps:
        return WspResult("reject")
    seen_blocks: set[tuple] = set()
    spent = 0
    for cut in cut_tuples(order, inv_eps):
        spent += 1
        if spent > budget:
            return WspResult("budget-exceeded")
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
        if key in seen_blocks:
            continue
        seen_blocks.add(key)
        perm = block_permutation(universe, blocks)
        uni2 = reorder_universe(universe, perm)
        f = tuple(max(b, key=lambda e: uni2.rank[e]) for b in blocks)
        fam2 = WeightedSetFamily(uni2, 3, family.sets, "max")
        inst = CwspInstance(uni2, fam2, W, k, inv_eps, f)
        try:
            res = solve_cwsp(inst, c, reduce=reduce, trace=trace)
        except BudgetExceededError:
            return WspResult("budget-exceeded")
        if res.accept:
            verify_cwsp_witness(inst, res)
            return WspResult("accept", res.ordered_sets, res.weight)
    return WspResult("reject")
