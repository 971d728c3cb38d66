"""Shared domain types: ordered universes, weighted set families, graphs, exact weights.

All APIs speak dense integer indices; string labels exist only at the JSON
boundary.  Every type is immutable after construction and safe to share.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

WEIGHT_MIN = -(2**63)
WEIGHT_MAX = 2**63 - 1


class FptMixError(Exception):
    """Base class for all library errors."""


class InstanceError(FptMixError):
    """Malformed document or violated type invariant."""


class WeightOverflowError(FptMixError):
    """A weight or weight sum left the signed 64-bit range."""


class ParameterError(FptMixError):
    """Algorithm parameters outside their stated domain."""


class BudgetExceededError(FptMixError):
    """An enumeration exceeded its configured budget."""


def check_weight(value) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InstanceError(f"weight must be an exact integer, got {value!r}")
    if not WEIGHT_MIN <= value <= WEIGHT_MAX:
        raise WeightOverflowError(f"weight {value} outside signed 64-bit range")
    return value


def add_weights(a: int, b: int) -> int:
    """Checked addition; overflow is an error, never a silent wrap."""
    total = a + b
    if not WEIGHT_MIN <= total <= WEIGHT_MAX:
        raise WeightOverflowError(f"weight sum {total} outside signed 64-bit range")
    return total


@dataclass(frozen=True)
class OrderedUniverse:
    """Indexed element set with a total order.

    ``elements[i]`` is the label of element ``i``; ``rank[i]`` is its position
    in the order.  Comparison of elements is comparison of ranks.
    """

    elements: tuple[str, ...]
    rank: tuple[int, ...]

    def __post_init__(self):
        n = len(self.elements)
        if len(self.rank) != n or sorted(self.rank) != list(range(n)):
            raise InstanceError("rank must be a bijection onto {0..n-1}")
        if len(set(self.elements)) != n:
            raise InstanceError("duplicate element label")

    @classmethod
    def from_labels(cls, labels) -> OrderedUniverse:
        """Universe whose order matches the label listing order."""
        labels = tuple(str(x) for x in labels)
        return cls(labels, tuple(range(len(labels))))

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, label: str) -> int:
        return self.elements.index(label)

    def by_rank(self) -> list[int]:
        """Element indices in ascending rank order."""
        order = [0] * len(self.elements)
        for idx, r in enumerate(self.rank):
            order[r] = idx
        return order

    def less(self, a: int, b: int) -> bool:
        return self.rank[a] < self.rank[b]

    def min_element(self, indices) -> int:
        return min(indices, key=lambda i: self.rank[i])


def reorder_universe(u: OrderedUniverse, new_order) -> OrderedUniverse:
    """Same elements, rank of element e becomes ``new_order[old_rank(e)]``."""
    n = len(u)
    new_order = list(new_order)
    if sorted(new_order) != list(range(n)):
        raise InstanceError("new_order is not a permutation of {0..n-1}")
    return OrderedUniverse(u.elements, tuple(new_order[r] for r in u.rank))


def block_permutation(u: OrderedUniverse, blocks) -> list[int]:
    """Permutation (old rank -> new rank) that moves the listed blocks of
    element indices to the front, in block order, preserving the original
    order inside each block and among the leftovers."""
    seen: set[int] = set()
    ordered: list[int] = []
    for block in blocks:
        members = sorted(block, key=lambda i: u.rank[i])
        for e in members:
            if e in seen:
                raise InstanceError("blocks must be disjoint")
            seen.add(e)
        ordered.extend(members)
    ordered.extend(e for e in u.by_rank() if e not in seen)
    perm = [0] * len(u)
    for new_rank, e in enumerate(ordered):
        perm[u.rank[e]] = new_rank
    return perm


@dataclass(frozen=True)
class WeightedSetFamily:
    """Family of equal-size element subsets with exact weights.

    Duplicate member sets collapse at construction, keeping the extremal
    weight for the declared objective.  Input listing order is preserved
    (first occurrence wins a position), which downstream tie-breaking
    relies on.
    """

    universe: OrderedUniverse
    set_size: int
    sets: tuple[tuple[tuple[int, ...], int], ...]
    objective: str = "max"
    masks: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.objective not in ("max", "min"):
            raise InstanceError(f"objective must be 'max' or 'min', got {self.objective!r}")
        n = len(self.universe)
        best: dict[tuple[int, ...], int] = {}
        order: list[tuple[int, ...]] = []
        for members, weight in self.sets:
            members = tuple(sorted(members))
            if len(set(members)) != self.set_size or len(members) != self.set_size:
                raise InstanceError(f"set {members} does not have exactly {self.set_size} members")
            if members and not (0 <= members[0] and members[-1] < n):
                raise InstanceError(f"member index out of range in {members}")
            check_weight(weight)
            if members in best:
                old = best[members]
                best[members] = max(old, weight) if self.objective == "max" else min(old, weight)
            else:
                best[members] = weight
                order.append(members)
        deduped = tuple((m, best[m]) for m in order)
        object.__setattr__(self, "sets", deduped)
        object.__setattr__(self, "masks", tuple(_mask(m) for m in order))

    def __len__(self) -> int:
        return len(self.sets)

    def members(self, i: int) -> tuple[int, ...]:
        return self.sets[i][0]

    def weight(self, i: int) -> int:
        return self.sets[i][1]

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.sets)


def _mask(members) -> int:
    m = 0
    for e in members:
        m |= 1 << e
    return m


@dataclass(frozen=True)
class Digraph:
    """Adjacency-list digraph with exact arc weights.

    No self-loops; parallel arcs collapse keeping the minimum weight.
    """

    node_count: int
    arcs: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.node_count < 0:
            raise InstanceError("node count must be non-negative")
        best: dict[tuple[int, int], int] = {}
        for tail, head, weight in self.arcs:
            for v in (tail, head):
                if not 0 <= v < self.node_count:
                    raise InstanceError(f"index out of range: node {v} on a {self.node_count}-node graph")
            if tail == head:
                raise InstanceError(f"self-loop at node {tail}")
            check_weight(weight)
            key = (tail, head)
            best[key] = min(best.get(key, weight), weight)
        object.__setattr__(
            self, "arcs", tuple((t, h, best[(t, h)]) for (t, h) in sorted(best))
        )

    def out_neighbors(self) -> list[list[int]]:
        out = [[] for _ in range(self.node_count)]
        for t, h, _ in self.arcs:
            out[t].append(h)
        return out

    def in_neighbors(self) -> list[list[int]]:
        inc = [[] for _ in range(self.node_count)]
        for t, h, _ in self.arcs:
            inc[h].append(t)
        return inc

    def arc_weights(self) -> dict[tuple[int, int], int]:
        return {(t, h): w for t, h, w in self.arcs}

    def underlying_graph(self) -> "Graph":
        edges = sorted({(min(t, h), max(t, h)) for t, h, _ in self.arcs})
        return Graph(self.node_count, tuple(edges))

    def reaches_all(self, root: int) -> bool:
        out = self.out_neighbors()
        seen = {root}
        stack = [root]
        while stack:
            for v in out[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.node_count


@dataclass(frozen=True)
class Graph:
    """Undirected graph; no self-loops, no duplicate edges."""

    node_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.node_count < 0:
            raise InstanceError("node count must be non-negative")
        seen = set()
        for u, v in self.edges:
            for x in (u, v):
                if not 0 <= x < self.node_count:
                    raise InstanceError(f"index out of range: node {x} on a {self.node_count}-node graph")
            if u == v:
                raise InstanceError(f"self-loop at node {u}")
            seen.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class ParsedInstance:
    kind: str  # "digraph" | "graph" | "setfamily"
    value: object
    k: int | None = None
    W: int | None = None


def parse_instance(document: bytes | str, objective: str = "max") -> ParsedInstance:
    """Parse a canonical JSON instance document, validating all invariants."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed document: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceError("document root must be an object")

    k = data.get("k")
    W = data.get("W")
    if k is not None and (not isinstance(k, int) or isinstance(k, bool)):
        raise InstanceError("k must be an integer")
    if W is not None:
        check_weight(W)

    if "arcs" in data:
        value: object = Digraph(_int_field(data, "nodes"), tuple(map(_arc, data["arcs"])))
        kind = "digraph"
    elif "edges" in data:
        value = Graph(_int_field(data, "nodes"), tuple(map(_edge, data["edges"])))
        kind = "graph"
    elif "universe" in data:
        value = _parse_setfamily(data, objective)
        kind = "setfamily"
    else:
        raise InstanceError("document is not a digraph, graph or setfamily instance")
    return ParsedInstance(kind, value, k, W)


def _int_field(data, name):
    v = data.get(name)
    if not isinstance(v, int) or isinstance(v, bool):
        raise InstanceError(f"field {name!r} must be an integer")
    return v


def _arc(entry):
    if not isinstance(entry, list) or len(entry) != 3:
        raise InstanceError(f"arc must be [tail, head, weight], got {entry!r}")
    return tuple(entry)


def _edge(entry):
    if not isinstance(entry, list) or len(entry) != 2:
        raise InstanceError(f"edge must be [u, v], got {entry!r}")
    return tuple(entry)


def _parse_setfamily(data, objective) -> WeightedSetFamily:
    universe = OrderedUniverse.from_labels(data["universe"])
    index = {label: i for i, label in enumerate(universe.elements)}
    sets = []
    size = None
    for entry in data.get("sets", []):
        members = entry.get("members")
        if members is None or "weight" not in entry:
            raise InstanceError(f"set entry must have members and weight: {entry!r}")
        try:
            idxs = tuple(index[str(m)] for m in members)
        except KeyError as exc:
            raise InstanceError(f"unknown element label {exc.args[0]!r}") from exc
        if size is None:
            size = len(idxs)
        sets.append((idxs, entry["weight"]))
    if size is None:
        size = 0
    return WeightedSetFamily(universe, size, tuple(sets), objective)


def serialize_instance(inst: ParsedInstance) -> str:
    """Canonical JSON; parse -> serialize -> parse is a fixed point."""
    doc: dict = {}
    v = inst.value
    if inst.kind == "digraph":
        doc["nodes"] = v.node_count
        doc["arcs"] = [[t, h, w] for t, h, w in v.arcs]
    elif inst.kind == "graph":
        doc["nodes"] = v.node_count
        doc["edges"] = [[a, b] for a, b in v.edges]
    elif inst.kind == "setfamily":
        order = v.universe.by_rank()
        doc["universe"] = [v.universe.elements[i] for i in order]
        doc["sets"] = [
            {"members": sorted((v.universe.elements[i] for i in members),
                               key=lambda s: v.universe.rank[v.universe.index_of(s)]),
             "weight": w}
            for members, w in sorted(v.sets)
        ]
    else:
        raise InstanceError(f"unknown instance kind {inst.kind!r}")
    if inst.k is not None:
        doc["k"] = inst.k
    if inst.W is not None:
        doc["W"] = inst.W
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))
