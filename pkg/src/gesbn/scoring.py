"""Decomposable scoring criteria over categorical data.

BDeu and BIC local scores computed from contingency counts, plus a
deterministic "oracle" criterion that scores a structure directly against
an exact joint distribution (the large-sample limit of the penalized
likelihood). All criteria decompose per node, so totals are assembled from
cached local terms.

Parent-configuration indexing is mixed-radix over the parent list sorted
ascending, lowest index most significant. Every consumer of conditional
tables in this package (tallies, CPT rows, exact conditionals) uses this
one convention.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .graphs import Dag, VariableSpec

CRITERIA = ("bdeu", "bic", "oracle")


@dataclass(frozen=True)
class ScoreConfig:
    """Which criterion to use and its knobs.

    ess is the BDeu equivalent sample size; structure_prior is a constant
    added to every total (it cancels in comparisons); oracle_pseudo_m is
    the effective sample size of the oracle criterion.
    """

    criterion: str = "bdeu"
    ess: float = 10.0
    structure_prior: float = 0.0
    oracle_pseudo_m: float = 1e6

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.ess <= 0:
            raise ValueError("ess must be positive")
        if self.oracle_pseudo_m <= 0:
            raise ValueError("oracle_pseudo_m must be positive")


class CategoricalDataset:
    """m records of integer-coded observations for the variables in spec."""

    def __init__(self, spec: VariableSpec, records):
        records = np.asarray(records, dtype=np.int64)
        if records.size == 0:
            records = records.reshape(0, spec.n)
        if records.ndim != 2 or records.shape[1] != spec.n:
            raise ValueError(f"records must have shape (m, {spec.n})")
        if records.shape[0]:
            if records.min() < 0 or (records >= np.array(spec.cards)).any():
                raise ValueError("record values out of range for spec cards")
        records.setflags(write=False)
        self.spec = spec
        self.records = records

    @property
    def m(self) -> int:
        return self.records.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, CategoricalDataset)
            and self.spec == other.spec
            and np.array_equal(self.records, other.records)
        )


@dataclass(frozen=True)
class SufficientStats:
    """Contingency counts for one child given an ordered parent set.

    counts has shape (q, r): q parent configurations by r child states.
    """

    child: int
    parents: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "parents", tuple(self.parents))

    @property
    def m(self) -> int:
        return int(self.counts.sum())


def config_indices(records, parents, cards) -> np.ndarray:
    """Mixed-radix configuration index of each record's parent values."""
    m = records.shape[0]
    idx = np.zeros(m, dtype=np.int64)
    for p in parents:
        idx = idx * cards[p] + records[:, p]
    return idx


def tally(data: CategoricalDataset, child, parents) -> SufficientStats:
    """Exact contingency counts of the child against its parent set."""
    parents = tuple(sorted(int(p) for p in parents))
    cards = data.spec.cards
    for v in (child, *parents):
        if not (0 <= v < data.spec.n):
            raise ValueError(f"variable {v} out of range")
    if child in parents:
        raise ValueError("child must not appear among its parents")
    q = data.spec.config_count(parents)
    r = cards[child]
    if data.m == 0:
        counts = np.zeros((q, r), dtype=np.int64)
    else:
        j = config_indices(data.records, parents, cards)
        counts = np.bincount(j * r + data.records[:, child], minlength=q * r)
        counts = counts.reshape(q, r)
    return SufficientStats(int(child), parents, counts)


def bdeu_local(stats: SufficientStats, ess=10.0) -> float:
    """Log marginal likelihood of one node under the uniform-BDeu prior."""
    if ess <= 0:
        raise ValueError("ess must be positive")
    q, r = stats.counts.shape
    a_row = ess / q
    a_cell = ess / (q * r)
    n_row = stats.counts.sum(axis=1)
    val = np.sum(gammaln(a_row) - gammaln(a_row + n_row))
    val += np.sum(gammaln(a_cell + stats.counts) - gammaln(a_cell))
    return float(val)


def bic_local(stats: SufficientStats, m) -> float:
    """Maximized log likelihood minus (q * (r-1) / 2) * log m for one node."""
    if m < 1:
        raise ValueError("bic requires at least one record")
    counts = stats.counts
    n_row = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = counts * (np.log(counts) - np.log(n_row))
    ll = float(np.where(counts > 0, terms, 0.0).sum())
    q, r = counts.shape
    return ll - 0.5 * q * (r - 1) * math.log(m)


def oracle_local(joint, child, parents, pseudo_m) -> float:
    """Local term of the oracle criterion for one node of a structure.

    pseudo_m * sum_jk p(pa_j, x_k) log p(x_k | pa_j) minus half the local
    dimension times log pseudo_m. Conditionals are read off the exact
    joint; zero-probability parent rows carry zero weight.
    """
    probs = joint.probs
    cards = joint.spec.cards
    parents = tuple(sorted(parents))
    keep = sorted(set(parents) | {child})
    drop = tuple(i for i in range(probs.ndim) if i not in keep)
    marg = probs.sum(axis=drop) if drop else probs
    axes = [keep.index(p) for p in parents] + [keep.index(child)]
    r = cards[child]
    pjk = np.transpose(marg, axes).reshape(-1, r)
    pj = pjk.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = pjk * (np.log(pjk) - np.log(pj))
    ell = float(np.where(pjk > 0, terms, 0.0).sum())
    q = pjk.shape[0]
    return pseudo_m * ell - 0.5 * q * (r - 1) * math.log(pseudo_m)


class LocalScoreCache:
    """Map from (child, parent set) to local score.

    Insert-if-absent semantics: concurrent duplicate computation is
    harmless, inconsistent values are not (first write wins).
    """

    def __init__(self):
        self._store = {}

    def local(self, child, parents, compute) -> float:
        key = (child, tuple(parents))
        val = self._store.get(key)
        if val is None:
            val = self._store.setdefault(key, compute())
        return val

    def __len__(self):
        return len(self._store)

    def items(self):
        return self._store.items()


class DecomposableScorer:
    """Total-score evaluator backed by a local-score cache."""

    def __init__(self, local_fn, structure_prior=0.0, cache=None):
        self._local_fn = local_fn
        self.structure_prior = structure_prior
        self.cache = cache if cache is not None else LocalScoreCache()

    def local(self, child, parents) -> float:
        parents = tuple(sorted(parents))
        return self.cache.local(
            child, parents, lambda: self._local_fn(child, parents)
        )

    def score_dag(self, g: Dag) -> float:
        total = sum(self.local(i, g.parents(i)) for i in range(g.n))
        return total + self.structure_prior


def dataset_scorer(data: CategoricalDataset, cfg: ScoreConfig, cache=None):
    if cfg.criterion == "bdeu":
        local = lambda child, parents: bdeu_local(tally(data, child, parents), cfg.ess)
    elif cfg.criterion == "bic":
        local = lambda child, parents: bic_local(tally(data, child, parents), data.m)
    else:
        raise ValueError("oracle criterion scores a joint table, not a dataset")
    return DecomposableScorer(local, cfg.structure_prior, cache)


def joint_scorer(joint, pseudo_m=1e6, structure_prior=0.0, cache=None):
    local = lambda child, parents: oracle_local(joint, child, parents, pseudo_m)
    return DecomposableScorer(local, structure_prior, cache)


def score(g: Dag, data: CategoricalDataset, cfg=None, cache=None) -> float:
    """Total decomposable score of a DAG on a dataset (bdeu or bic)."""
    cfg = cfg if cfg is not None else ScoreConfig()
    return dataset_scorer(data, cfg, cache).score_dag(g)


def oracle_score(g: Dag, joint, pseudo_m=1e6, cache=None) -> float:
    """Deterministic large-sample score of a DAG against an exact joint."""
    if pseudo_m <= 0:
        raise ValueError("pseudo_m must be positive")
    return joint_scorer(joint, pseudo_m, cache=cache).score_dag(g)


# ---------------------------------------------------------------------------
# dataset files: CSV with a header row of names, plus a JSON schema sidecar

def save_schema(spec: VariableSpec, path):
    doc = {
        "version": 1,
        "variables": [
            {"name": s, "cardinality": c} for s, c in zip(spec.names, spec.cards)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_schema(path) -> VariableSpec:
    with open(path) as fh:
        doc = json.load(fh)
    names = tuple(v["name"] for v in doc["variables"])
    cards = tuple(int(v["cardinality"]) for v in doc["variables"])
    return VariableSpec(names, cards)


def save_dataset(data: CategoricalDataset, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.spec.names)
        writer.writerows(data.records.tolist())


def load_dataset(path, schema=None, infer_cards=False) -> CategoricalDataset:
    """Read a dataset CSV.

    State counts come from the schema (a VariableSpec or a sidecar path);
    with infer_cards=True they are inferred as column max + 1 instead.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[int(v) for v in row] for row in reader if row]
    names = tuple(h.strip() for h in header)
    records = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(names))
    if schema is not None:
        spec = schema if isinstance(schema, VariableSpec) else load_schema(schema)
        if spec.names != names:
            raise ValueError(
                f"schema names {spec.names} do not match CSV header {names}"
            )
    elif infer_cards:
        maxes = records.max(axis=0) if len(rows) else np.zeros(len(names), int)
        spec = VariableSpec(names, tuple(int(v) + 1 for v in maxes))
    else:
        raise ValueError("need a schema, or pass infer_cards=True explicitly")
    return CategoricalDataset(spec, records)
