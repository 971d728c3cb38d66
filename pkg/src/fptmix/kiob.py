"""Deterministic k-internal out-branching.

Pipeline: a child-splitting DP computes representative families of the
node-sets of bounded-shape out-trees, a tree-and-paths search completes each
surviving tree with a maximum matching on the leftover nodes, and an
exchange loop lifts an accepted tree-plus-paths witness to a spanning
out-branching with the required number of internal nodes.

Shape bookkeeping here is already in reduced form: a ``TpInstance`` with
parameters (k, l, q) asks for an out-tree with exactly k internal nodes and
l leaves plus q node-disjoint 2-node paths avoiding it.  The top-level
driver shrinks the requested totals by q before calling in.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (Digraph, FptMixError, Graph, OrderedUniverse, ParameterError,
                   WeightedSetFamily)
from .matching import max_matching
from .repsets import PartitionPart, PartitionSpec, gen_rep_alg


@dataclass(frozen=True)
class TreeFamilyEntry:
    root: int
    internal_count: int
    leaf_count: int
    family: WeightedSetFamily

    def __post_init__(self):
        size = self.internal_count + self.leaf_count
        for members, _ in self.family.sets:
            if self.root not in members or len(members) != size:
                raise ParameterError("tree family entry holds a malformed set")


@dataclass(frozen=True)
class TpInstance:
    digraph: Digraph
    root: int
    k: int
    l: int
    q: int

    def __post_init__(self):
        if self.l > self.k:
            raise ParameterError(f"l={self.l} exceeds k={self.k}")
        if self.q < max(0, 2 * self.l - self.k):
            raise ParameterError(f"q={self.q} below max(0, 2l-k)")
        if not 0 <= self.root < self.digraph.node_count:
            raise ParameterError(f"root {self.root} out of range")
        if not self.digraph.reaches_all(self.root):
            raise ParameterError(f"root {self.root} does not root an out-branching")


def _node_universe(g: Digraph) -> OrderedUniverse:
    return OrderedUniverse.from_labels(str(v) for v in range(g.node_count))


def tree_families(g: Digraph, root: int, internal: int, leaves: int,
                  slack: int, c: float = 1.0) -> TreeFamilyEntry:
    """Family that ``slack``-represents the node-sets of out-trees rooted at
    ``root`` with exactly ``internal`` internal nodes and ``leaves`` leaves.

    Child-splitting DP over (vertex, internal, leaf) states.  OneChild grows a
    tree downward through a single child arc; the merge rule fuses two trees
    sharing only their root.  Duplicate generation from child orderings is
    tolerated: the representative reduction after every state deduplicates.
    """
    if not (internal >= 1 or (internal, leaves) == (0, 1)):
        raise ParameterError(f"unsupported tree shape ({internal}, {leaves})")
    n = g.node_count
    if internal + leaves + slack > n:
        raise ParameterError("internal + leaves + slack exceeds the node count")
    universe = _node_universe(g)
    out = g.out_neighbors()
    total = internal + leaves

    # table[v][(x, y)] -> set of frozensets (node-sets of out-trees at v)
    table: list[dict[tuple[int, int], list[frozenset]]] = [dict() for _ in range(n)]

    def reduce_state(sets: set[frozenset], size: int) -> list[frozenset]:
        if not sets:
            return []
        members = tuple((tuple(sorted(s)), 0) for s in sorted(sets, key=sorted))
        fam = WeightedSetFamily(universe, size, members, "max")
        z = (internal + leaves - size) + slack
        spec = PartitionSpec((PartitionPart(tuple(range(n)), size + z, size, c),))
        reduced = gen_rep_alg(spec, fam, "max")
        return [frozenset(m) for m, _ in reduced.sets]

    for size in range(1, total + 1):
        for v in range(n):
            for x in range(0, size + 1):
                y = size - x
                if x == 0 and y != 1:
                    continue
                if y == 0:
                    continue
                if x > internal or y > leaves:
                    continue
                if size == 1:
                    if (x, y) == (0, 1):
                        table[v][(0, 1)] = [frozenset({v})]
                    continue
                found: set[frozenset] = set()
                one_child: dict[tuple[int, int], list[frozenset]] = {}

                def one_child_sets(x1: int, y1: int) -> list[frozenset]:
                    key = (x1, y1)
                    if key not in one_child:
                        acc = []
                        for u in sorted(out[v]):
                            for a in table[u].get((x1 - 1, y1), ()):
                                if v not in a:
                                    acc.append(a | {v})
                        one_child[key] = acc
                    return one_child[key]

                found.update(one_child_sets(x, y))
                for x1 in range(1, x + 1):
                    for y1 in range(0, y + 1):
                        x2, y2 = x + 1 - x1, y - y1
                        if x2 < 1 or y2 < 0:
                            continue
                        for b in table[v].get((x2, y2), ()):
                            for a in one_child_sets(x1, y1):
                                if a & b == {v}:
                                    found.add(a | b)
                if found:
                    table[v][(x, y)] = reduce_state(found, size)

    sets = table[root].get((internal, leaves), [])
    members = tuple((tuple(sorted(s)), 0) for s in sets)
    fam = WeightedSetFamily(universe, total, members, "max")
    return TreeFamilyEntry(root, internal, leaves, fam)


@dataclass(frozen=True)
class TpResult:
    accept: bool
    tree_set: frozenset | None = None
    tree_arcs: tuple[tuple[int, int], ...] | None = None
    paths: tuple[tuple[int, int], ...] | None = None


def tp_alg(inst: TpInstance, c: float = 1.0) -> TpResult:
    """Tree-and-paths: accept iff some tree in the representing family leaves
    room for a q-edge matching, which supplies the q disjoint 2-node paths."""
    g = inst.digraph
    n = g.node_count
    arc_set = {(t, h) for t, h, _ in g.arcs}
    if inst.k + inst.l + 2 * inst.q > n:
        return TpResult(False)
    if inst.k == 0 and inst.l == 0:
        # the witness tree is empty; only the q disjoint 2-node paths are sought
        m = max_matching(g.underlying_graph())
        if len(m) < inst.q:
            return TpResult(False)
        paths = tuple((a, b) if (a, b) in arc_set else (b, a)
                      for a, b in m.edges[: inst.q])
        return TpResult(True, frozenset(), (), paths)
    if inst.l == 0:
        return TpResult(False)
    entry = tree_families(g, inst.root, inst.k, inst.l, 2 * inst.q, c)
    undirected = g.underlying_graph()
    for members, _ in entry.family.sets:
        nodes = set(members)
        free = tuple((u, v) for u, v in undirected.edges
                     if u not in nodes and v not in nodes)
        m = max_matching(Graph(n, free))
        if len(m) >= inst.q:
            paths = []
            for a, b in m.edges[: inst.q]:
                paths.append((a, b) if (a, b) in arc_set else (b, a))
            arcs = find_out_tree(g, inst.root, frozenset(members), inst.k)
            return TpResult(True, frozenset(members), tuple(arcs), tuple(paths))
    return TpResult(False)


def find_out_tree(g: Digraph, root: int, nodes: frozenset, internal: int):
    """Some out-tree rooted at root spanning exactly ``nodes`` with the given
    internal count, as a sorted arc list.  Exhaustive over parent vectors."""
    if root not in nodes:
        raise ParameterError("tree node set must contain the root")
    others = sorted(nodes - {root})
    if not others:
        if internal != 0:
            raise FptMixError("no tree with the requested internal count")
        return []
    inn = g.in_neighbors()
    choices = [[p for p in sorted(inn[v]) if p in nodes] for v in others]

    def assign(idx: int, parent: dict):
        if idx == len(others):
            for v in others:
                seen = set()
                w = v
                while w != root:
                    if w in seen:
                        return None
                    seen.add(w)
                    w = parent[w]
            if len(set(parent.values())) == internal:
                return sorted((p, v) for v, p in parent.items())
            return None
        v = others[idx]
        for p in choices[idx]:
            parent[v] = p
            got = assign(idx + 1, parent)
            if got is not None:
                return got
        parent.pop(v, None)
        return None

    got = assign(0, {})
    if got is None:
        raise FptMixError("node set admits no out-tree with the requested shape")
    return got


def extract_branching(g: Digraph, root: int, tree_set: frozenset,
                      paths, k: int) -> tuple[tuple[int, int], ...]:
    """Lift a tree-and-paths witness to a spanning out-branching with at
    least k internal nodes.

    Exchange loop: while short of internal nodes, find a witness path (v, u)
    with both endpoints leaves of the current branching, detach u from its
    parent and reattach it under v.  Each exchange strictly increases the
    number of fully contained witness paths, so it runs at most q times; a
    failure to find an exchangeable path on a valid witness cannot happen
    and raises hard.
    """
    paths = list(paths)
    tree_internal = k - len(paths)
    if tree_set:
        tree_arcs = find_out_tree(g, root, tree_set, tree_internal)
        parent = {h: t for t, h in tree_arcs}
        in_tree = set(tree_set)
    else:
        parent = {}
        in_tree = {root}
    arcs_sorted = [(t, h) for t, h, _ in g.arcs]
    while len(in_tree) < g.node_count:
        grown = False
        for t, h in arcs_sorted:
            if t in in_tree and h not in in_tree:
                parent[h] = t
                in_tree.add(h)
                grown = True
                break
        if not grown:
            raise FptMixError("root does not reach every node")

    def internal_count():
        return len(set(parent.values()))

    while internal_count() < k:
        children = set(parent.values())
        swapped = False
        for v, u in paths:
            if v not in children and u not in children:
                parent[u] = v
                swapped = True
                break
        if not swapped:
            raise FptMixError("exchange exhausted before reaching k internal nodes")

    branching = tuple(sorted((p, v) for v, p in parent.items()))
    _validate_branching(g, root, branching, k)
    return branching


def _validate_branching(g: Digraph, root: int, arcs, k: int) -> None:
    arc_set = {(t, h) for t, h, _ in g.arcs}
    parent = {}
    for t, h in arcs:
        if (t, h) not in arc_set:
            raise FptMixError(f"branching uses non-arc {(t, h)}")
        if h in parent:
            raise FptMixError(f"node {h} has two parents")
        parent[h] = t
    nodes = set(range(g.node_count))
    if set(parent) != nodes - {root} or root in parent:
        raise FptMixError("branching is not spanning with the stated root")
    for v in parent:
        seen = set()
        w = v
        while w != root:
            if w in seen:
                raise FptMixError("branching contains a cycle")
            seen.add(w)
            w = parent[w]
    if len(set(parent.values())) < k:
        raise FptMixError("branching has fewer internal nodes than required")


@dataclass(frozen=True)
class KiobResult:
    accept: bool
    root: int | None = None
    branching: tuple[tuple[int, int], ...] | None = None


def solve_kiob(g: Digraph, k: int, c: float = 1.0) -> KiobResult:
    """Accept iff the digraph has an out-branching with >= k internal nodes.

    Iterates candidate roots, then leaf counts l and path counts q, calling
    the tree-and-paths search on the q-reduced shape; an accepted witness is
    lifted to a full out-branching.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    n = g.node_count
    for root in range(n):
        if n > 0 and not g.reaches_all(root):
            continue
        for l in range(1, k + 1):
            for q in range(max(0, 2 * l - k), l + 1):
                x, y = k - q, l - q
                if y == 0 and x > 0:
                    continue
                if x + y + 2 * q > n:
                    continue
                res = tp_alg(TpInstance(g, root, x, y, q))
                if res.accept:
                    branching = extract_branching(g, root, res.tree_set, res.paths, k)
                    return KiobResult(True, root, branching)
    return KiobResult(False)


def branching_internal_nodes(arcs) -> int:
    return len({t for t, _ in arcs})


def verify_tp_witness(inst: TpInstance, res: TpResult) -> None:
    """Structural check of an accepted tree-and-paths witness."""
    if not res.accept:
        raise FptMixError("cannot verify a reject")
    g = inst.digraph
    tree_arcs = res.tree_arcs
    nodes = res.tree_set
    arc_set = {(t, h) for t, h, _ in g.arcs}
    if len(nodes) != inst.k + inst.l:
        raise FptMixError("tree node count mismatch")
    parent = {}
    for t, h in tree_arcs:
        if (t, h) not in arc_set or t not in nodes or h not in nodes:
            raise FptMixError("tree arc invalid")
        if h in parent:
            raise FptMixError("tree node has two parents")
        parent[h] = t
    if set(parent) != set(nodes) - {inst.root}:
        raise FptMixError("tree is not spanning its node set from the root")
    if len(set(parent.values())) != inst.k:
        raise FptMixError("tree internal count mismatch")
    used = set(nodes)
    if len(res.paths) != inst.q:
        raise FptMixError("path count mismatch")
    for v, u in res.paths:
        if (v, u) not in arc_set:
            raise FptMixError("path arc missing")
        if v in used or u in used or v == u:
            raise FptMixError("paths are not disjoint from the tree and each other")
        used.update((v, u))
