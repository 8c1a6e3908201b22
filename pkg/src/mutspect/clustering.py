"""Threshold agglomerative clustering and the coupled x/tau parameter search.

Clustering is sequential average-linkage agglomeration over the similarity
graph: starting from singletons, repeatedly merge the cluster pair with the
greatest mean cross-pair similarity while that greatest linkage is at least
``tau``.  Average linkage is reducible (a merged cluster's linkage to any
third cluster never exceeds the linkage just consumed), so the greedy merge
sequence does not depend on ``tau``; the threshold only picks the stopping
point.  The sequence is therefore computed once per graph and cached, and a
clustering at any ``tau`` is a prefix cut of it.

The parameter search walks the sampling-rate grid linearly and binary-searches
``tau`` inside each round until the mutant reduction rate lands in the
requested constraint interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError
from .spectra import SampleSet, SimilarityGraph
from .util import phase_timer, philox_rng

X_GRID = (1, 3, 5, 10, 20, 30, 40, 50, 100, 200, 300)
TAU_FLOOR = 1e-5
TAU_CEIL = 0.99999
WIDTH_CAP = 1e-6
NOT_SATISFIABLE_MESSAGE = "Mutant reduction goal not satisfiable"


@dataclass(frozen=True)
class ReductionConstraint:
    """Target interval [lo, hi] for the mutant reduction rate."""

    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValidationError(
                f"constraint must satisfy 0 <= lo <= hi <= 1, got [{self.lo}, {self.hi}]"
            )

    def contains(self, rate: float) -> bool:
        return self.lo <= rate <= self.hi


DEFAULT_REDUCTION = ReductionConstraint(0.26, 0.56)


@dataclass(frozen=True)
class ClusterSet:
    """Disjoint nonempty clusters covering the graph's mutant ids."""

    clusters: tuple[tuple[int, ...], ...]
    tau: float
    per_class_rate: int | None = None

    def __len__(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class RepresentativeMap:
    pairs: tuple[tuple[int, tuple[int, ...]], ...]  # (representative, members)
    seed: int

    def representatives(self) -> list[int]:
        return [rep for rep, _ in self.pairs]


@dataclass(frozen=True)
class MergeStep:
    linkage: float
    members_a: tuple[int, ...]  # graph positions, sorted
    members_b: tuple[int, ...]


def _merge_trajectory(weights: np.ndarray) -> list[MergeStep]:
    """Full greedy average-linkage merge sequence for a dense weight table.

    Linkage between clusters is the mean of the cross weights, recomputed
    with np.mean over the index block so repeated runs are bit-identical.
    Ties on linkage resolve to the pair whose smallest member position is
    lowest, then by the other cluster's smallest position.
    """
    n = weights.shape[0]
    members: list[list[int] | None] = [[i] for i in range(n)]
    linkage = weights.astype(np.float64).copy()
    np.fill_diagonal(linkage, -np.inf)
    active = np.ones(n, dtype=bool)
    steps: list[MergeStep] = []
    for _ in range(n - 1):
        table = np.where(active[:, None] & active[None, :], linkage, -np.inf)
        best = table.max()
        cand = np.argwhere(table == best)
        pairs = {(min(int(a), int(b)), max(int(a), int(b))) for a, b in cand}
        key = min(pairs, key=lambda p: (members[p[0]][0], members[p[1]][0]))
        i, j = key if members[key[0]][0] <= members[key[1]][0] else key[::-1]
        steps.append(
            MergeStep(float(best), tuple(members[i]), tuple(members[j]))
        )
        members[i] = sorted(members[i] + members[j])
        members[j] = None
        active[j] = False
        block_i = members[i]
        for c in np.flatnonzero(active):
            if c == i:
                continue
            value = float(np.mean(weights[np.ix_(block_i, members[c])]))
            linkage[i, c] = value
            linkage[c, i] = value
    return steps


def _trajectory_for(graph: SimilarityGraph) -> list[MergeStep]:
    if graph._trajectory is None:
        graph._trajectory = _merge_trajectory(graph.weights)
    return graph._trajectory


def hac_cluster(graph: SimilarityGraph, tau: float) -> ClusterSet:
    """Partition of the graph's mutants at linkage threshold ``tau``.

    Equivalent to merging the best pair while its average linkage >= tau;
    implemented as a prefix cut of the cached merge trajectory.
    """
    if not 0.0 < tau < 1.0:
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")
    steps = _trajectory_for(graph)
    parent = list(range(graph.n_nodes))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for step in steps:
        if step.linkage < tau:
            break
        ra, rb = find(step.members_a[0]), find(step.members_b[0])
        parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, list[int]] = {}
    for pos in range(graph.n_nodes):
        groups.setdefault(find(pos), []).append(pos)
    clusters = sorted(
        (tuple(graph.ids[p] for p in sorted(group)) for group in groups.values()),
        key=lambda c: c[0],
    )
    return ClusterSet(tuple(clusters), tau)


def mutant_reduction_rate(n_mutants: int, clusters: ClusterSet) -> float:
    """(N - |C|) / N: fraction of mutants spared full testing."""
    if len(clusters) > n_mutants:
        raise ValidationError("more clusters than mutants")
    return (n_mutants - len(clusters)) / n_mutants


@dataclass
class XRound:
    """Trace of one sampling-rate round of the parameter search."""

    per_class_rate: int
    taus: list[float] = field(default_factory=list)
    rates: list[float] = field(default_factory=list)
    cluster_counts: list[int] = field(default_factory=list)
    stop_reason: str | None = None

    @property
    def iterations(self) -> int:
        return len(self.taus)


@dataclass
class SearchResult:
    found: bool
    clusters: ClusterSet | None = None
    sample: SampleSet | None = None
    per_class_rate: int | None = None
    tau: float | None = None
    rounds: list[XRound] = field(default_factory=list)

    @property
    def message(self) -> str:
        return "satisfied" if self.found else NOT_SATISFIABLE_MESSAGE


def parameter_search(
    build,
    constraint: ReductionConstraint,
    x_grid=X_GRID,
    n_mutants: int | None = None,
    phases: dict | None = None,
) -> SearchResult:
    """Linear search over sampling rates, binary search over tau per rate.

    ``build(x)`` must return ``(SampleSet, SimilarityGraph)`` for sampling
    rate ``x``.  Per round, tau starts at the midpoint of (0, 1); a rate
    below the constraint lowers the upper bound, a rate above it raises the
    lower bound, and a rate inside returns immediately.  A round ends when
    the midpoint leaves [1e-5, 0.99999] or the interval width drops under
    1e-6 (plateau guard; the plain midpoint test alone cannot terminate on
    an interior plateau).  Not satisfiable is a value, not an exception.
    ``phases`` accumulates wall-clock seconds spent in clustering calls.
    """
    rounds: list[XRound] = []
    for x in x_grid:
        sample, graph = build(x)
        n = n_mutants if n_mutants is not None else graph.n_nodes
        round_trace = XRound(per_class_rate=x)
        rounds.append(round_trace)
        tau_lo, tau_hi = 0.0, 1.0
        while True:
            tau = tau_lo + (tau_hi - tau_lo) / 2
            if not TAU_FLOOR <= tau <= TAU_CEIL:
                round_trace.stop_reason = "midpoint-out-of-range"
                break
            if tau_hi - tau_lo < WIDTH_CAP:
                round_trace.stop_reason = "interval-collapsed"
                break
            if phases is None:
                clusters = hac_cluster(graph, tau)
            else:
                with phase_timer(phases, "clustering"):
                    clusters = hac_cluster(graph, tau)
            rate = mutant_reduction_rate(n, clusters)
            round_trace.taus.append(tau)
            round_trace.rates.append(rate)
            round_trace.cluster_counts.append(len(clusters))
            if rate < constraint.lo:
                tau_hi = tau
            elif rate > constraint.hi:
                tau_lo = tau
            else:
                round_trace.stop_reason = "satisfied"
                clusters = ClusterSet(clusters.clusters, tau, per_class_rate=x)
                return SearchResult(
                    found=True,
                    clusters=clusters,
                    sample=sample,
                    per_class_rate=x,
                    tau=tau,
                    rounds=rounds,
                )
    return SearchResult(found=False, rounds=rounds)


def select_representatives(
    clusters: ClusterSet, seed: int, deterministic: bool = False
) -> RepresentativeMap:
    """One representative per cluster.

    Clusters are visited sorted by smallest member id; the pick is uniform
    via one ``integers(len(cluster))`` draw per cluster from
    ``philox_rng(seed)``, or the lowest member id in deterministic mode.
    """
    rng = philox_rng(seed)
    pairs = []
    for cluster in sorted(clusters.clusters, key=lambda c: c[0]):
        if deterministic:
            rep = cluster[0]
        else:
            rep = cluster[int(rng.integers(len(cluster)))]
        pairs.append((rep, tuple(cluster)))
    return RepresentativeMap(tuple(pairs), seed)
