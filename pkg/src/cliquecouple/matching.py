"""Perfect matchings in uniform hypergraphs and the coupling-to-factor pipeline."""

from __future__ import annotations

from dataclasses import dataclass

from .coupling import CouplingConfig, CouplingResult, run_coupling
from .errors import CapExceeded, ContractViolation, DivisibilityError
from .graphs import FCopy, SimpleGraph, find_factor_direct
from .hypergraph import Hypergraph, to_hypergraph
from .rng import RandomStream

MATCHING_NODE_CAP = 2_000_000


@dataclass(frozen=True)
class Matching:
    hyperedges: tuple[frozenset[int], ...]
    ambient_n: int

    def __post_init__(self):
        seen: set[int] = set()
        for h in self.hyperedges:
            if h & seen:
                raise ContractViolation("matching hyperedges must be pairwise disjoint")
            seen |= h

    @property
    def covered(self) -> frozenset[int]:
        return frozenset().union(*self.hyperedges) if self.hyperedges else frozenset()

    @property
    def is_perfect(self) -> bool:
        return len(self.covered) == self.ambient_n

    def to_text(self) -> str:
        return "".join(" ".join(map(str, sorted(h))) + "\n" for h in self.hyperedges)


@dataclass(frozen=True)
class FactorCertificate:
    copies: tuple[FCopy, ...]
    host: SimpleGraph


def perfect_matching(H: Hypergraph, node_cap: int = MATCHING_NODE_CAP) -> Matching | None:
    """Exact cover of the vertex set by hyperedges, branching on the vertex with fewest options.

    Repeated hyperedges are treated as a single candidate.
    """
    n, r = H.ambient_n, H.r
    if n % r:
        raise DivisibilityError(f"r={r} does not divide n={n}")
    if n == 0:
        return Matching((), 0)
    masks = sorted({sum(1 << v for v in h) for h in H.hyperedges})
    by_vertex: list[list[int]] = [[] for _ in range(n)]
    for m in masks:
        for v in range(n):
            if m >> v & 1:
                by_vertex[v].append(m)
    if any(not opts for opts in by_vertex):
        return None
    full = (1 << n) - 1
    chosen: list[int] = []
    nodes = 0

    def rec(covered: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise CapExceeded(f"matching search exceeded {node_cap} nodes")
        if covered == full:
            return True
        best = None
        for v in range(n):
            if covered >> v & 1:
                continue
            opts = [m for m in by_vertex[v] if not m & covered]
            if best is None or len(opts) < len(best):
                best = opts
                if len(opts) <= 1:
                    break
        for m in best:
            chosen.append(m)
            if rec(covered | m):
                return True
            chosen.pop()
        return False

    if not rec(0):
        return None
    return Matching(tuple(frozenset(v for v in range(n) if m >> v & 1) for m in chosen), n)


def verify_certificate(cert: FactorCertificate) -> bool:
    """Disjoint copies covering every host vertex, each with all its edges in the host."""
    seen: set[int] = set()
    for c in cert.copies:
        vs = set(c.vertex_image)
        if len(vs) != len(c.vertex_image) or vs & seen:
            return False
        if any(not 0 <= v < cert.host.vertex_count for v in vs):
            return False
        if not c.edges <= cert.host.edges:
            return False
        if c.pattern is not None and len(c.edges) != c.pattern.s:
            return False
        seen |= vs
    return len(seen) == cert.host.vertex_count


@dataclass
class FactorOutcome:
    result: CouplingResult
    matching: Matching | None
    certificate: FactorCertificate | None

    @property
    def success(self) -> bool:
        return self.certificate is not None


def run_factor_pipeline(config: CouplingConfig, rng: RandomStream, record_steps: bool = False) -> FactorOutcome:
    """Couple, match the vertex-set hypergraph of H, and map the matching back to copies in G."""
    if config.n % config.pattern.r:
        raise DivisibilityError(f"|F|={config.pattern.r} does not divide n={config.n}")
    result = run_coupling(config, rng, record_steps=record_steps)
    if result.failed:
        return FactorOutcome(result, None, None)
    matching = perfect_matching(to_hypergraph(result.H))
    if matching is None:
        return FactorOutcome(result, None, None)
    by_set: dict[frozenset[int], FCopy] = {}
    for c in result.H.f_edges:
        by_set.setdefault(c.vertices, c)
    cert = FactorCertificate(tuple(by_set[h] for h in matching.hyperedges), result.G)
    if not verify_certificate(cert):
        raise ContractViolation("coupled copies do not form a factor of G")
    return FactorOutcome(result, matching, cert)


def factor_via_coupling(config: CouplingConfig, rng: RandomStream) -> FactorCertificate | None:
    return run_factor_pipeline(config, rng).certificate


def factor_exists_direct(G: SimpleGraph, config: CouplingConfig) -> bool:
    return find_factor_direct(G, config.pattern) is not None
