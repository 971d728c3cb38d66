"""Separator data structures and (generalized) representative families.

A family F over a universe part E' is (E', k', p')-good when for every
X subset of E' of size p' and Y subset of E' \\ X of size at most k' - p',
some member contains X and avoids Y.  A separator stores such a family and
answers chi(S) = indices of members containing S.

``gen_rep_alg`` computes a subfamily that max/min represents its input in
the generalized, per-part-budget sense: one separator per part, an implicit
product family addressed by mixed radix, and a single weight-ordered sweep
over indicator bits.  ``check_representation`` is the exhaustive oracle for
the same property and never shares code with the selection path.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations, product

from .core import (
    BudgetExceededError,
    InstanceError,
    OrderedUniverse,
    ParameterError,
    WeightedSetFamily,
)
from . import unisets

_LINEAR_SCAN_THRESHOLD = 64
_DENSE_PART_CAP = 200_000


@dataclass
class SeparatorStats:
    zeta: int
    build_seconds: float
    worst_query_seconds: float = 0.0
    construction: str = "greedy"


@dataclass(frozen=True)
class SeparatorFamily:
    """An (E', k', p')-separator over a slice of an ordered universe.

    ``family`` holds bitsets over part-local positions; positions follow the
    part's universe-rank order.  ``element_maps`` caches, per local element,
    the bitmask of family members containing it.
    """

    part_elements: tuple[int, ...]
    k_prime: int
    p_prime: int
    c_prime: float
    family: tuple[int, ...]
    stats: SeparatorStats = field(compare=False)
    element_maps: tuple[int, ...] = field(compare=False, repr=False)

    def local_position(self, element: int) -> int:
        return self.part_elements.index(element)


_separator_cache: dict[tuple[int, int, int], tuple[int, ...]] = {}


def clear_separator_cache() -> None:
    _separator_cache.clear()


_GREEDY_CELL_CAP = 16_000_000  # candidates x constraints worth running greedy cover on


def _local_family(m: int, k: int, p: int, budget: int | None) -> tuple[tuple[int, ...], str]:
    """Family of local bitsets that is (m, k, p)-good.

    Greedy universal-set backed while the cover computation is cheap; beyond
    that, the complete family of p-subsets (a valid universal set via
    extension by zeros, so goodness holds exactly, only without compression).
    """
    key = (m, k, p)
    if key in _separator_cache:
        return _separator_cache[key], "cached"
    cells = (1 << m) * unisets.constraint_count(m, k, p) if m <= 24 else None
    mode = "greedy"
    fam = None
    if cells is not None and cells <= _GREEDY_CELL_CAP:
        try:
            uni = unisets.build_universal(m, k, p, mode="greedy", budget=budget)
            fam = tuple(f & ((1 << m) - 1) for f in uni.functions)
        except BudgetExceededError:
            fam = None
    if fam is None:
        if math.comb(m, p) > _DENSE_PART_CAP:
            raise BudgetExceededError(
                f"part of size {m} needs {math.comb(m, p)} dense separator sets")
        fam = tuple(sum(1 << i for i in members) for members in combinations(range(m), p))
        mode = "dense"
    _separator_cache[key] = fam
    return fam, mode


def build_separator(universe: OrderedUniverse, part, k_prime: int, p_prime: int,
                    c_prime: float = 1.0, budget: int | None = None) -> SeparatorFamily:
    """Construct a goodness-backed separator for one universe part.

    The c' tradeoff parameter is recorded but does not steer the desk-scale
    construction; it only matters to the analytic bound formulas.
    """
    elements = tuple(sorted(part, key=lambda e: universe.rank[e]))
    m = len(elements)
    if not 0 <= p_prime <= k_prime:
        raise ParameterError(f"need 0 <= p' <= k', got k'={k_prime} p'={p_prime}")
    if p_prime > m:
        raise ParameterError(f"p'={p_prime} exceeds part size {m}")
    if c_prime < 1:
        raise ParameterError(f"c'={c_prime} must be >= 1")
    k_eff = min(k_prime, m)  # Y cannot use more than m - p' elements anyway
    start = time.perf_counter()
    fam, mode = _local_family(m, k_eff, p_prime, budget)
    elapsed = time.perf_counter() - start
    maps = []
    for pos in range(m):
        bit = 1 << pos
        mask = 0
        for j, f in enumerate(fam):
            if f & bit:
                mask |= 1 << j
        maps.append(mask)
    stats = SeparatorStats(zeta=len(fam), build_seconds=elapsed, construction=mode)
    return SeparatorFamily(elements, k_prime, p_prime, c_prime, fam, stats, tuple(maps))


def query_separator(sep: SeparatorFamily, s) -> list[int]:
    """chi(S): ascending indices of family members containing S."""
    local = [sep.local_position(e) for e in s]
    if len(local) != sep.p_prime:
        raise ParameterError(f"|S|={len(local)} but separator expects p'={sep.p_prime}")
    start = time.perf_counter()
    if len(sep.family) < _LINEAR_SCAN_THRESHOLD:
        need = 0
        for pos in local:
            need |= 1 << pos
        out = [j for j, f in enumerate(sep.family) if f & need == need]
    else:
        mask = (1 << len(sep.family)) - 1
        for pos in local:
            mask &= sep.element_maps[pos]
        out = _bit_positions(mask)
    sep.stats.worst_query_seconds = max(sep.stats.worst_query_seconds,
                                        time.perf_counter() - start)
    return out


def _bit_positions(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def check_goodness(sep: SeparatorFamily) -> tuple[bool, tuple | None]:
    """Exhaustive (X, Y) sweep of the goodness property; desk scale only."""
    elems = sep.part_elements
    m = len(elems)
    slack = min(sep.k_prime - sep.p_prime, m - sep.p_prime)
    for x_pos in combinations(range(m), sep.p_prime):
        x_mask = sum(1 << i for i in x_pos)
        rest = [i for i in range(m) if not (x_mask >> i) & 1]
        for y_pos in combinations(rest, slack):
            y_mask = sum(1 << i for i in y_pos)
            if not any(f & x_mask == x_mask and f & y_mask == 0 for f in sep.family):
                return False, (tuple(elems[i] for i in x_pos), tuple(elems[i] for i in y_pos))
    return True, None


@dataclass(frozen=True)
class PartitionPart:
    elements: tuple[int, ...]
    k: int
    p: int
    c: float = 1.0


@dataclass(frozen=True)
class PartitionSpec:
    """Per-part budgets (E_i, k_i, p_i, c_i) parameterizing generalized representation."""

    parts: tuple[PartitionPart, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for part in self.parts:
            if part.p > part.k:
                raise ParameterError(f"part has p={part.p} > k={part.k}")
            if part.c < 1:
                raise ParameterError(f"part has c={part.c} < 1")
            dup = seen.intersection(part.elements)
            if dup:
                raise InstanceError(f"parts are not disjoint: element {min(dup)} repeated")
            seen.update(part.elements)


def _validate_membership(spec: PartitionSpec, family: WeightedSetFamily) -> None:
    covered: set[int] = set()
    for part in spec.parts:
        covered.update(part.elements)
    for members, _ in family.sets:
        if any(e not in covered for e in members):
            raise InstanceError(f"set {members} has members outside the partition")
        for part in spec.parts:
            inside = sum(1 for e in members if e in set(part.elements))
            if inside != part.p:
                raise InstanceError(
                    f"set {members} has {inside} members in a part expecting exactly {part.p}")


def select_representative_positions(spec: PartitionSpec, family: WeightedSetFamily,
                                    objective: str,
                                    budget: int | None = None) -> tuple[list[int], int]:
    """Positions (into ``family.sets``) kept by the weight-ordered sweep, plus
    the implicit product-family size.  Core of ``gen_rep_alg``, shared with the
    dynamic programs that track payloads alongside member sets."""
    if objective not in ("max", "min"):
        raise ParameterError(f"objective must be 'max' or 'min', got {objective!r}")
    _validate_membership(spec, family)
    count = len(family)
    if count <= 1:
        return list(range(count)), 1

    active = [part for part in spec.parts if not (part.k == 0 and part.p == 0)]
    seps = [build_separator(family.universe, part.elements, part.k, part.p, part.c, budget)
            for part in active]
    part_sets = [set(part.elements) for part in active]

    chi: list[list[list[int]]] = []  # chi[set][part] -> member indices
    for members, _ in family.sets:
        row = []
        for part_elems, sep in zip(part_sets, seps):
            inside = [e for e in members if e in part_elems]
            row.append(query_separator(sep, inside))
        chi.append(row)

    sizes = [len(sep.family) for sep in seps]
    product_size = math.prod(sizes) if sizes else 1

    reverse = objective == "max"
    order = sorted(range(count), key=lambda i: family.weight(i), reverse=reverse)

    # indicator bits z_F over the mixed-radix product space; never materialized as sets
    used = 0
    selected: list[int] = []
    for pos in order:
        row = chi[pos]
        if any(not lst for lst in row):
            continue
        fresh = []
        for combo in product(*row):
            idx = 0
            for size, j in zip(sizes, combo):
                idx = idx * size + j
            if not (used >> idx) & 1:
                fresh.append(idx)
        if fresh:
            selected.append(pos)
            for idx in fresh:
                used |= 1 << idx
    selected.sort()
    return selected, product_size


def gen_rep_alg(spec: PartitionSpec, family: WeightedSetFamily,
                objective: str, budget: int | None = None) -> WeightedSetFamily:
    """Subfamily that max (min) (k_1-p_1, ..., k_t-p_t)-represents the input.

    Deterministic given fixed separators: stable weight sort with ties broken
    by ascending input position, then first-wins indicator sweep.
    """
    positions, _ = select_representative_positions(spec, family, objective, budget)
    kept = tuple(family.sets[i] for i in positions)
    return WeightedSetFamily(family.universe, family.set_size, kept, objective)


@dataclass(frozen=True)
class RepresentationCheck:
    valid: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None


def check_representation(spec: PartitionSpec, original: WeightedSetFamily,
                         candidate: WeightedSetFamily, objective: str,
                         budget: int | None = None) -> RepresentationCheck:
    """Exhaustive verification of the generalized representation property.

    Enumerates, for every X in the original family, the per-part-maximal
    avoidance sets Y drawn from elements of candidate sets (elements outside
    every candidate set can never invalidate a witness, so skipping them
    loses nothing).  Returns a concrete violating (X, Y) on failure.
    """
    if objective not in ("max", "min"):
        raise ParameterError(f"objective must be 'max' or 'min', got {objective!r}")
    _validate_membership(spec, original)
    cand_lookup = dict(candidate.sets)
    orig_lookup = dict(original.sets)
    for members, weight in candidate.sets:
        if members not in orig_lookup or orig_lookup[members] != weight:
            raise InstanceError("candidate is not a subfamily of the original")

    relevant: set[int] = set()
    for members, _ in candidate.sets:
        relevant.update(members)

    ordered = sorted(candidate.sets, key=lambda sw: sw[1], reverse=(objective == "max"))
    cand_masks = [(sum(1 << e for e in m), w) for m, w in ordered]

    budget = budget if budget is not None else 5_000_000
    work = 0
    for x_members, x_weight in original.sets:
        x_set = set(x_members)
        pools = []
        for part in spec.parts:
            avail = sorted(relevant.intersection(part.elements) - x_set)
            take = min(part.k - part.p, len(avail))
            pools.append(list(combinations(avail, take)))
        total_y = math.prod(len(p) for p in pools)
        work += total_y
        if work > budget:
            raise BudgetExceededError(f"representation check needs > {budget} (X, Y) pairs")
        for choice in product(*pools):
            y_mask = 0
            y_flat: tuple[int, ...] = ()
            for group in choice:
                y_flat += group
                for e in group:
                    y_mask |= 1 << e
            ok = False
            for mask, w in cand_masks:
                if objective == "max" and w < x_weight:
                    break
                if objective == "min" and w > x_weight:
                    break
                if mask & y_mask == 0:
                    ok = True
                    break
            if not ok:
                return RepresentationCheck(False, (x_members, y_flat))
    return RepresentationCheck(True)
