"""Directed-graph and equivalence-class machinery.

DAGs over integer node ids, d-separation, covered edges, CPDAG completion,
and the equivalence / inclusion relations between DAG models. Variable
names and cardinalities live in :class:`VariableSpec`; graphs themselves
only know node indices, which keeps them cheap to hash and compare.

Everything here is an immutable value; all operations are pure functions,
several of them memoized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations


class GraphError(ValueError):
    """Structural error: cycles, missing edges, malformed graphs."""


@dataclass(frozen=True)
class VariableSpec:
    """Ordered variable names plus per-variable state counts.

    Cardinality 1 is allowed (constant indicator variables); everything
    else must have at least two states.
    """

    names: tuple[str, ...]
    cards: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        object.__setattr__(self, "cards", tuple(int(c) for c in self.cards))
        if len(self.names) != len(self.cards):
            raise ValueError("names and cards must have equal length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")
        if any(c < 1 for c in self.cards):
            raise ValueError("cardinalities must be positive")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def subset(self, keep) -> "VariableSpec":
        """Spec restricted to the given node indices, in the given order."""
        keep = tuple(keep)
        return VariableSpec(
            tuple(self.names[i] for i in keep),
            tuple(self.cards[i] for i in keep),
        )

    def config_count(self, parents) -> int:
        """Number of joint configurations of the given variables."""
        return math.prod(self.cards[p] for p in parents)


def _toposort(n, edges):
    """Topological order with smallest-index-first tie-breaking."""
    children = {u: [] for u in range(n)}
    indeg = [0] * n
    for u, v in edges:
        children[u].append(v)
        indeg[v] += 1
    order = []
    remaining = set(range(n))
    while remaining:
        ready = sorted(u for u in remaining if indeg[u] == 0)
        if not ready:
            raise GraphError("cycle detected")
        u = ready[0]
        remaining.discard(u)
        order.append(u)
        for v in children[u]:
            indeg[v] -= 1
    return order


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over nodes 0..n-1.

    Edges are ordered (parent, child) pairs. Construction validates index
    range, absence of self loops and 2-cycles, and acyclicity.
    """

    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise GraphError(f"self loop at node {u}")
            if (v, u) in edges:
                raise GraphError(f"both orientations of {u}-{v} present")
        _toposort(self.n, edges)  # raises on cycles

    def parents(self, v) -> tuple:
        return tuple(sorted(u for u, w in self.edges if w == v))

    def children(self, v) -> tuple:
        return tuple(sorted(w for u, w in self.edges if u == v))

    def adjacent(self, u, v) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def skeleton(self) -> frozenset:
        """Unordered adjacency pairs, each as (min, max)."""
        return frozenset((min(u, v), max(u, v)) for u, v in self.edges)

    def add_edge(self, u, v) -> "Dag":
        if self.adjacent(u, v):
            raise GraphError(f"{u} and {v} already adjacent")
        return Dag(self.n, self.edges | {(u, v)})

    def remove_edge(self, u, v) -> "Dag":
        if (u, v) not in self.edges:
            raise GraphError(f"edge ({u},{v}) absent")
        return Dag(self.n, self.edges - {(u, v)})

    def sorted_edges(self) -> tuple:
        return tuple(sorted(self.edges))


@dataclass(frozen=True)
class Cpdag:
    """Completed PDAG: canonical representative of an equivalence class.

    Directed edges are those oriented identically in every member DAG;
    undirected pairs are stored as (min, max).
    """

    n: int
    directed: frozenset = frozenset()
    undirected: frozenset = frozenset()

    def __post_init__(self):
        directed = frozenset((int(u), int(v)) for u, v in self.directed)
        undirected = frozenset(
            (min(int(u), int(v)), max(int(u), int(v))) for u, v in self.undirected
        )
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "undirected", undirected)
        for u, v in directed | undirected:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise GraphError(f"self loop at node {u}")
        dir_pairs = {(min(u, v), max(u, v)) for u, v in directed}
        if len(dir_pairs) != len(directed):
            raise GraphError("both orientations of a pair marked directed")
        if dir_pairs & undirected:
            raise GraphError("pair both directed and undirected")

    def skeleton(self) -> frozenset:
        return frozenset((min(u, v), max(u, v)) for u, v in self.directed) | self.undirected

    def edge_count(self) -> int:
        return len(self.directed) + len(self.undirected)


def empty_cpdag(n) -> Cpdag:
    return Cpdag(n)


def complete_cpdag(n) -> Cpdag:
    """The no-constraints class: every pair adjacent, all edges reversible."""
    return Cpdag(n, undirected=frozenset(combinations(range(n), 2)))


def canonical_key(c: Cpdag) -> tuple:
    """Total order on classes of equal n, used for deterministic tie-breaks."""
    return (tuple(sorted(c.directed)), tuple(sorted(c.undirected)))


def dag_key(g: Dag) -> tuple:
    return g.sorted_edges()


@dataclass(frozen=True)
class SepQuery:
    """A d-separation triple: is x independent of y given the set z?"""

    x: int
    y: int
    z: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "z", frozenset(int(v) for v in self.z))
        if self.x == self.y:
            raise ValueError("x and y must differ")
        if self.x in self.z or self.y in self.z:
            raise ValueError("x and y must not appear in z")


def topological_order(g: Dag) -> list:
    """Node order in which every edge points forward; ties by node index."""
    return _toposort(g.n, g.edges)


def ancestors(g: Dag, nodes) -> set:
    """Ancestral closure of the given nodes (includes the nodes themselves)."""
    closed = set(nodes)
    frontier = list(closed)
    parents_of = {}
    for u, v in g.edges:
        parents_of.setdefault(v, []).append(u)
    while frontier:
        v = frontier.pop()
        for u in parents_of.get(v, ()):
            if u not in closed:
                closed.add(u)
                frontier.append(u)
    return closed


def d_separated(g: Dag, q: SepQuery) -> bool:
    """Decide d-separation via the moralized ancestral graph.

    x and y are d-separated by z iff they are disconnected after taking the
    subgraph on ancestors of {x,y} u z, marrying co-parents, dropping
    directions, and deleting z.
    """
    for v in (q.x, q.y, *q.z):
        if not (0 <= v < g.n):
            raise GraphError(f"node {v} out of range for n={g.n}")
    anc = ancestors(g, {q.x, q.y} | q.z)
    neigh = {v: set() for v in anc}
    for u, v in g.edges:
        if u in anc and v in anc:
            neigh[u].add(v)
            neigh[v].add(u)
    for w in anc:
        ps = [u for u, v in g.edges if v == w and u in anc]
        for a, b in combinations(ps, 2):
            neigh[a].add(b)
            neigh[b].add(a)
    # BFS from x, avoiding z
    seen = {q.x}
    frontier = [q.x]
    while frontier:
        v = frontier.pop()
        for w in neigh[v]:
            if w == q.y:
                return False
            if w not in seen and w not in q.z:
                seen.add(w)
                frontier.append(w)
    return True


@lru_cache(maxsize=None)
def dsep_triples(g: Dag) -> frozenset:
    """All held d-separation statements (x, y, z) with x < y, z over the rest."""
    out = set()
    for x, y in combinations(range(g.n), 2):
        rest = [v for v in range(g.n) if v != x and v != y]
        for k in range(len(rest) + 1):
            for z in combinations(rest, k):
                if d_separated(g, SepQuery(x, y, frozenset(z))):
                    out.add((x, y, frozenset(z)))
    return frozenset(out)


def is_covered(g: Dag, edge) -> bool:
    """True iff parents(child) = parents(parent) + {parent} for this edge."""
    u, v = edge
    if (u, v) not in g.edges:
        raise GraphError(f"edge ({u},{v}) not in graph")
    return set(g.parents(v)) == set(g.parents(u)) | {u}

def reverse_covered(g: Dag, edge) -> Dag:
    """Reverse a covered edge; the result stays in the same equivalence class."""
    u, v = edge
    if not is_covered(g, edge):
        raise GraphError(f"edge ({u},{v}) is not covered")
    return Dag(g.n, (g.edges - {(u, v)}) | {(v, u)})


def _vstructures(g: Dag) -> frozenset:
    """Induced colliders (a, c, b) with a < b, a,b non-adjacent parents of c."""
    out = set()
    for c in range(g.n):
        for a, b in combinations(g.parents(c), 2):
            if not g.adjacent(a, b):
                out.add((a, c, b))
    return frozenset(out)


def equivalent(g1: Dag, g2: Dag) -> bool:
    """Same equivalence class, via the skeleton + v-structure criterion."""
    if g1.n != g2.n:
        raise GraphError("node-count mismatch")
    return g1.skeleton() == g2.skeleton() and _vstructures(g1) == _vstructures(g2)


def included_in(g: Dag, h: Dag) -> bool:
    """True iff every d-separation statement of h also holds in g (g <= h)."""
    if g.n != h.n:
        raise GraphError("node-count mismatch")
    return dsep_triples(h) <= dsep_triples(g)


@lru_cache(maxsize=None)
def dag_to_cpdag(g: Dag) -> Cpdag:
    """Canonical class representative: keep v-structure orientations, close
    under the three orientation-propagation rules, leave the rest undirected."""
    skel = g.skeleton()
    adj = {v: set() for v in range(g.n)}
    for u, v in skel:
        adj[u].add(v)
        adj[v].add(u)
    orient = {}  # (min,max) pair -> None or (tail, head)

    def _set(a, b):
        pair = (min(a, b), max(a, b))
        cur = orient[pair]
        if cur == (b, a):
            raise GraphError("orientation conflict while completing pattern")
        changed = cur is None
        orient[pair] = (a, b)
        return changed

    def _dir(a, b):
        return orient[(min(a, b), max(a, b))] == (a, b)

    def _undir(a, b):
        return orient[(min(a, b), max(a, b))] is None

    for pair in skel:
        orient[pair] = None
    for a, c, b in _vstructures(g):
        _set(a, c)
        _set(b, c)

    changed = True
    while changed:
        changed = False
        for b in range(g.n):
            for a in adj[b]:
                if not _dir(a, b):
                    continue
                # R1: a -> b -- c with a,c non-adjacent  =>  b -> c
                for c in adj[b]:
                    if c != a and _undir(b, c) and c not in adj[a]:
                        changed |= _set(b, c)
                # R2: a -> b -> c with a -- c  =>  a -> c
                for c in adj[b]:
                    if c != a and _dir(b, c) and c in adj[a] and _undir(a, c):
                        changed |= _set(a, c)
        # R3: a -- b, a -- c, a -- d, c -> b, d -> b, c,d non-adjacent  =>  a -> b
        for a in range(g.n):
            for b in adj[a]:
                if not _undir(a, b):
                    continue
                into_b = [c for c in adj[b] if c != a and c in adj[a] and _dir(c, b) and _undir(a, c)]
                for c, d in combinations(into_b, 2):
                    if c not in adj[d]:
                        changed |= _set(a, b)
                        break
    directed = frozenset(e for e in orient.values() if e is not None)
    undirected = frozenset(p for p, e in orient.items() if e is None)
    return Cpdag(g.n, directed, undirected)


@lru_cache(maxsize=None)
def consistent_extensions(c: Cpdag) -> tuple:
    """All member DAGs of the class, sorted by edge list.

    Brute force over orientations of the undirected pairs, keeping exactly
    the acyclic candidates whose completed pattern round-trips to c.
    """
    und = sorted(c.undirected)
    out = []
    for bits in range(1 << len(und)):
        edges = set(c.directed)
        for i, (u, v) in enumerate(und):
            edges.add((u, v) if bits >> i & 1 else (v, u))
        try:
            g = Dag(c.n, frozenset(edges))
        except GraphError:
            continue
        if dag_to_cpdag(g) == c:
            out.append(g)
    if not out:
        raise GraphError("CPDAG has no consistent extension")
    return tuple(sorted(out, key=dag_key))


def parameter_count(g: Dag, spec: VariableSpec) -> int:
    """Free parameters of the full-table model: sum of (r_i - 1) * prod(r_pa)."""
    if spec.n != g.n:
        raise ValueError("spec does not match graph size")
    return sum(
        (spec.cards[i] - 1) * spec.config_count(g.parents(i)) for i in range(g.n)
    )


def encode_edges(graph, spec: VariableSpec) -> str:
    """Canonical text encoding: one 'u -> v' or 'u -- v' line per edge, sorted."""
    if isinstance(graph, Dag):
        items = [(u, v, "->") for u, v in graph.edges]
    else:
        items = [(u, v, "->") for u, v in graph.directed]
        items += [(u, v, "--") for u, v in graph.undirected]
    lines = [
        f"{spec.names[u]} {sep} {spec.names[v]}" for u, v, sep in sorted(items)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def _parse_edge_lines(text, spec):
    directed, undirected = set(), set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if " -> " in line:
            lhs, rhs = line.split(" -> ", 1)
            directed.add((spec.index(lhs.strip()), spec.index(rhs.strip())))
        elif " -- " in line:
            lhs, rhs = line.split(" -- ", 1)
            undirected.add((spec.index(lhs.strip()), spec.index(rhs.strip())))
        else:
            raise GraphError(f"unparseable edge line: {raw!r}")
    return directed, undirected


def cpdag_from_text(text, spec: VariableSpec) -> Cpdag:
    directed, undirected = _parse_edge_lines(text, spec)
    return Cpdag(spec.n, frozenset(directed), frozenset(undirected))


def dag_from_text(text, spec: VariableSpec) -> Dag:
    directed, undirected = _parse_edge_lines(text, spec)
    if undirected:
        raise GraphError("undirected edges not allowed in a DAG encoding")
    return Dag(spec.n, frozenset(directed))
