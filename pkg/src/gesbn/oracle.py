"""Exact brute-force ground truth for small variable counts.

Dense joint tables computed from parametric networks, conditional
independence read directly off the table, complete DAG / equivalence-class
enumerations, inclusion- and parameter-optimality sweeps, a numeric check
of the composition property, and a breadth-first search for the
covered-reversal-plus-addition sequences that witness inclusion between
two DAGs.

Floating point with tolerances is the contract here: oracle joints are
products of clean CPT entries, so a residual tolerance of 1e-10 sits far
above accumulation error and far below any genuine dependence produced by
the interior parameter sampler.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .datagen import GoldStandard, ParametricBn
from .graphs import (
    Cpdag,
    Dag,
    GraphError,
    VariableSpec,
    canonical_key,
    consistent_extensions,
    dag_key,
    dag_to_cpdag,
    dsep_triples,
    included_in,
    parameter_count,
)

CI_TOL = 1e-10
MAX_JOINT_CELLS = 10_000_000


class JointTable:
    """Exact joint distribution over a variable set, as a dense array."""

    def __init__(self, spec: VariableSpec, probs):
        probs = np.asarray(probs, dtype=float).reshape(spec.cards)
        if probs.min() < 0:
            raise ValueError("joint table has negative entries")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("joint table does not sum to 1")
        probs.setflags(write=False)
        self.spec = spec
        self.probs = probs

    @property
    def n(self) -> int:
        return self.spec.n


@dataclass(frozen=True)
class CiStatement:
    """One conditional-independence claim X indep Y given Z, with its truth."""

    x: frozenset
    y: frozenset
    z: frozenset
    holds: bool

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, frozenset(int(v) for v in getattr(self, name)))
        if not self.x or not self.y:
            raise ValueError("x and y must be nonempty")
        if self.x & self.y or self.x & self.z or self.y & self.z:
            raise ValueError("x, y, z must be pairwise disjoint")


@dataclass(frozen=True)
class CompositionResult:
    holds: bool
    counterexample: CiStatement | None = None

    def __bool__(self):
        return self.holds


def joint_from_bn(bn: ParametricBn) -> JointTable:
    """Product of the CPTs over the full state space."""
    cards = bn.spec.cards
    cells = int(np.prod(cards))
    if cells > MAX_JOINT_CELLS:
        raise ValueError(f"state space of {cells} cells exceeds the oracle limit")
    idx = np.indices(cards)
    probs = np.ones(cards)
    for i in range(bn.spec.n):
        cfg = np.zeros(cards, dtype=np.int64)
        for p in bn.structure.parents(i):
            cfg = cfg * cards[p] + idx[p]
        probs = probs * bn.cpts[i][cfg, idx[i]]
    return JointTable(bn.spec, probs)


def condition_and_marginalize(p: JointTable, fix=None, drop=()) -> JointTable:
    """Condition on the assignments in fix, then sum out the drop set.

    Fixed variables are removed from the result along with the dropped
    ones. Raises on a zero-probability conditioning event.
    """
    fix = dict(fix or {})
    drop = set(drop)
    for v in (*fix, *drop):
        if not (0 <= v < p.n):
            raise ValueError(f"variable {v} out of range")
    sel = tuple(fix.get(v, slice(None)) for v in range(p.n))
    sliced = p.probs[sel]
    total = sliced.sum()
    if total <= 0:
        raise ValueError("zero-probability conditioning event")
    remaining = [v for v in range(p.n) if v not in fix]
    drop_axes = tuple(i for i, v in enumerate(remaining) if v in drop)
    out = sliced.sum(axis=drop_axes) if drop_axes else sliced
    keep = [v for v in remaining if v not in drop]
    return JointTable(p.spec.subset(keep), out / total)


def observed_margin(gold: GoldStandard) -> JointTable:
    """The exact distribution a gold standard induces over its observables."""
    if gold.bn is None:
        raise ValueError("gold standard carries no parameters; call with_parameters")
    joint = joint_from_bn(gold.bn)
    fix = gold.selection_dict
    drop = set(gold.hidden) | set(fix)
    return condition_and_marginalize(joint, fix, drop)


def _as_set(v) -> frozenset:
    if isinstance(v, (int, np.integer)):
        return frozenset((int(v),))
    return frozenset(int(i) for i in v)


def ci_holds(p: JointTable, x, y, z=(), tol=CI_TOL) -> bool:
    """True iff max_z-config |p(x,y|z) - p(x|z) p(y|z)| <= tol.

    Configurations of z with zero probability are skipped.
    """
    x, y, z = _as_set(x), _as_set(y), _as_set(z)
    if not x or not y:
        raise ValueError("x and y must be nonempty")
    if x & y or x & z or y & z:
        raise ValueError("x, y, z must be pairwise disjoint")
    keep = sorted(x | y | z)
    if keep and (keep[0] < 0 or keep[-1] >= p.n):
        raise ValueError("variable index out of range")
    drop = tuple(i for i in range(p.n) if i not in keep)
    marg = p.probs.sum(axis=drop) if drop else p.probs
    pos = {v: i for i, v in enumerate(keep)}
    zax = [pos[v] for v in sorted(z)]
    xax = [pos[v] for v in sorted(x)]
    yax = [pos[v] for v in sorted(y)]
    cards = p.spec.cards
    nz = int(np.prod([cards[v] for v in sorted(z)])) if z else 1
    nx = int(np.prod([cards[v] for v in sorted(x)]))
    ny = int(np.prod([cards[v] for v in sorted(y)]))
    tm = marg.transpose(zax + xax + yax).reshape(nz, nx, ny)
    pz = tm.sum(axis=(1, 2))
    mask = pz > 0
    if not mask.any():
        return True
    tm, pz = tm[mask], pz[mask]
    pxz = tm.sum(axis=2)
    pyz = tm.sum(axis=1)
    resid = tm * pz[:, None, None] - pxz[:, :, None] * pyz[:, None, :]
    rel = np.abs(resid) / (pz ** 2)[:, None, None]
    return bool(rel.max() <= tol)


def composition_holds(p: JointTable, tol=CI_TOL) -> CompositionResult:
    """Check the composition property over every (singleton, set, set) triple.

    Dependence of X on a set Y given Z must be witnessed by some singleton
    member of Y. Returns the first counterexample in deterministic sweep
    order when the property fails.
    """
    n = p.n
    for x in range(n):
        rest = [v for v in range(n) if v != x]
        for ysize in range(2, len(rest) + 1):
            for yset in combinations(rest, ysize):
                others = [v for v in rest if v not in yset]
                for zsize in range(len(others) + 1):
                    for zset in combinations(others, zsize):
                        if ci_holds(p, x, yset, zset, tol):
                            continue
                        if all(ci_holds(p, x, (y,), zset, tol) for y in yset):
                            stmt = CiStatement(
                                frozenset((x,)), frozenset(yset), frozenset(zset), False
                            )
                            return CompositionResult(False, stmt)
    return CompositionResult(True)


@lru_cache(maxsize=None)
def enumerate_dags(n) -> tuple:
    """Every DAG on n nodes, by brute force over pairwise edge states."""
    if n > 5:
        raise ValueError("DAG enumeration limited to n <= 5")
    pairs = list(combinations(range(n), 2))
    out = []
    for states in product((0, 1, 2), repeat=len(pairs)):
        edges = set()
        for (u, v), s in zip(pairs, states):
            if s == 1:
                edges.add((u, v))
            elif s == 2:
                edges.add((v, u))
        try:
            out.append(Dag(n, frozenset(edges)))
        except GraphError:
            continue
    return tuple(sorted(out, key=dag_key))


@lru_cache(maxsize=None)
def enumerate_classes(n) -> tuple:
    """Every equivalence class on n nodes, deduplicated by completed pattern."""
    seen = {}
    for g in enumerate_dags(n):
        seen.setdefault(dag_to_cpdag(g), None)
    return tuple(sorted(seen, key=canonical_key))


def class_representative(c: Cpdag) -> Dag:
    return consistent_extensions(c)[0]


def all_ci_triples(n):
    """All (x, y, z) singleton-pair queries, x < y, z over the rest."""
    for x, y in combinations(range(n), 2):
        rest = [v for v in range(n) if v != x and v != y]
        for k in range(len(rest) + 1):
            for z in combinations(rest, k):
                yield x, y, frozenset(z)


def ci_triple_set(p: JointTable, tol=CI_TOL) -> frozenset:
    """The singleton-pair conditional independencies that hold in p."""
    return frozenset(
        (x, y, z) for x, y, z in all_ci_triples(p.n) if ci_holds(p, x, y, z, tol)
    )


def includes(g: Dag, p: JointTable, tol=CI_TOL) -> bool:
    """True iff every d-separation of g is a conditional independence of p."""
    if g.n != p.n:
        raise ValueError("graph and joint table sizes differ")
    return all(ci_holds(p, x, y, z, tol) for x, y, z in dsep_triples(g))


def _including_classes(p, tol):
    ci = ci_triple_set(p, tol)
    out = []
    for c in enumerate_classes(p.n):
        ds = dsep_triples(class_representative(c))
        if ds <= ci:
            out.append((c, ds))
    return out


def inclusion_optimal_classes(p: JointTable, tol=CI_TOL) -> tuple:
    """Classes that include p with no strictly-included class also including it."""
    if p.n > 4:
        raise ValueError("optimality sweep limited to n <= 4")
    incl = _including_classes(p, tol)
    out = [
        c
        for c, ds in incl
        if not any(ds2 > ds for _, ds2 in incl)
    ]
    return tuple(sorted(out, key=canonical_key))


def parameter_optimal_classes(p: JointTable, spec=None, tol=CI_TOL) -> tuple:
    """Including classes of minimal parameter count."""
    if p.n > 4:
        raise ValueError("optimality sweep limited to n <= 4")
    spec = spec if spec is not None else p.spec
    incl = _including_classes(p, tol)
    if not incl:
        return ()
    counts = {c: parameter_count(class_representative(c), spec) for c, _ in incl}
    best = min(counts.values())
    return tuple(
        sorted((c for c, d in counts.items() if d == best), key=canonical_key)
    )


def transformation_sequence(g: Dag, h: Dag) -> list:
    """Covered reversals and edge additions turning g into h, staying <= h.

    Requires g <= h. Breadth-first search over {reverse covered edge, add
    one edge} moves, every intermediate a DAG included in h; the returned
    sequence has length at most r + 2a, where r counts edges of h with
    opposite orientation in g and a counts adjacencies of h missing in g.
    """
    if g.n != h.n:
        raise GraphError("node-count mismatch")
    if not included_in(g, h):
        raise GraphError("g is not included in h")
    if g == h:
        return []
    r = sum(1 for u, v in h.edges if (v, u) in g.edges)
    a = sum(1 for u, v in h.edges if (u, v) not in g.edges and (v, u) not in g.edges)
    bound = r + 2 * a
    target_dseps = dsep_triples(h)
    target_skel = h.skeleton()
    seen = {g}
    queue = deque([(g, ())])
    while queue:
        cur, moves = queue.popleft()
        if len(moves) >= bound:
            continue
        for nxt, mv in _transformation_moves(cur, target_skel):
            if nxt in seen:
                continue
            seen.add(nxt)
            if not target_dseps <= dsep_triples(nxt):
                continue
            path = moves + (mv,)
            if nxt == h:
                return list(path)
            queue.append((nxt, path))
    raise GraphError(f"no transformation sequence of length <= {bound} found")


def _transformation_moves(g: Dag, target_skel):
    from .graphs import is_covered, reverse_covered

    for e in sorted(g.edges):
        if is_covered(g, e):
            yield reverse_covered(g, e), ("reverse", e)
    for u, v in sorted(target_skel):
        if g.adjacent(u, v):
            continue
        for a, b in ((u, v), (v, u)):
            try:
                yield g.add_edge(a, b), ("add", (a, b))
            except GraphError:
                continue


def save_joint_csv(p: JointTable, path):
    """Debug dump: one row per full state plus its probability."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([*p.spec.names, "probability"])
        for state in product(*(range(c) for c in p.spec.cards)):
            writer.writerow([*state, repr(float(p.probs[state]))])
