"""Uniform multi-hypergraphs, F-graphs and their cycle structure."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .errors import BudgetError, ConfigError, ContractViolation
from .graphs import FCopy, PatternGraph, SimpleGraph, copies_in, load_pattern

AVOIDABLE_NODE_CAP = 200_000


@dataclass(frozen=True)
class Hypergraph:
    """r-uniform multi-hypergraph on {0..ambient_n-1}; hyperedges keep their order."""

    r: int
    ambient_n: int
    hyperedges: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        hs = tuple(frozenset(h) for h in self.hyperedges)
        for h in hs:
            if len(h) != self.r:
                raise ValueError(f"hyperedge {sorted(h)} does not have {self.r} vertices")
            if any(not 0 <= v < self.ambient_n for v in h):
                raise ValueError(f"hyperedge {sorted(h)} out of range for n={self.ambient_n}")
        object.__setattr__(self, "hyperedges", hs)

    @property
    def e(self) -> int:
        return len(self.hyperedges)

    def spanned(self) -> frozenset[int]:
        return frozenset().union(*self.hyperedges) if self.hyperedges else frozenset()

    def sub(self, indices: Iterable[int]) -> "Hypergraph":
        return Hypergraph(self.r, self.ambient_n, tuple(self.hyperedges[i] for i in sorted(indices)))

    def add(self, *hs: Iterable[int]) -> "Hypergraph":
        return Hypergraph(self.r, self.ambient_n, self.hyperedges + tuple(frozenset(h) for h in hs))

    def degrees(self) -> list[int]:
        deg = [0] * self.ambient_n
        for h in self.hyperedges:
            for v in h:
                deg[v] += 1
        return deg

    def component_indices(self) -> list[list[int]]:
        """Hyperedge indices grouped by connected component, in first-appearance order."""
        parent = list(range(self.e))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        owner: dict[int, int] = {}
        for i, h in enumerate(self.hyperedges):
            for v in h:
                if v in owner:
                    a, b = find(owner[v]), find(i)
                    if a != b:
                        parent[max(a, b)] = min(a, b)
                else:
                    owner[v] = i
        groups: dict[int, list[int]] = {}
        for i in range(self.e):
            groups.setdefault(find(i), []).append(i)
        return list(groups.values())

    def is_connected(self) -> bool:
        return len(self.component_indices()) <= 1

    def to_text(self) -> str:
        lines = [f"{self.r} {self.ambient_n} {self.e}"]
        lines += [" ".join(map(str, sorted(h))) for h in self.hyperedges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows:
            raise ConfigError("empty hypergraph file")
        try:
            r, n, m = (int(x) for x in rows[0][:3])
            hs = [frozenset(int(x) for x in row) for row in rows[1:]]
        except ValueError as exc:
            raise ConfigError(f"malformed hypergraph file: {exc}") from None
        if len(hs) != m:
            raise ConfigError(f"header announces {m} hyperedges, found {len(hs)}")
        try:
            return cls(r, n, tuple(hs))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class FGraph:
    """A vertex range plus a set of distinct copies of a pattern (the F-edges)."""

    pattern: PatternGraph
    ambient_n: int
    f_edges: tuple[FCopy, ...] = ()

    def __post_init__(self):
        seen = set()
        for c in self.f_edges:
            if c.edges in seen:
                raise ValueError("F-edges must be distinct copies")
            seen.add(c.edges)
            if len(c.edges) != self.pattern.s or any(not 0 <= v < self.ambient_n for v in c.vertex_image):
                raise ValueError("F-edge is not a copy of the pattern inside the vertex range")

    def add(self, copy: FCopy) -> "FGraph":
        return FGraph(self.pattern, self.ambient_n, self.f_edges + (copy,))

    def to_text(self, pattern_ref: str | None = None) -> str:
        ref = pattern_ref or self.pattern.name
        lines = [f"pattern {ref}", f"{self.ambient_n} {len(self.f_edges)}"]
        lines += [" ".join(map(str, c.vertex_image)) for c in self.f_edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FGraph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if len(rows) < 2 or rows[0][0] != "pattern":
            raise ConfigError("F-graph file must start with 'pattern <name-or-path>'")
        pattern = load_pattern(rows[0][1])
        n, m = int(rows[1][0]), int(rows[1][1])
        copies = []
        for row in rows[2:]:
            img = tuple(int(x) for x in row)
            if len(img) != pattern.r or len(set(img)) != pattern.r:
                raise ConfigError(f"vertex image {img} is not injective on {pattern.r} vertices")
            copies.append(FCopy.from_image(pattern, img))
        if len(copies) != m:
            raise ConfigError(f"header announces {m} F-edges, found {len(copies)}")
        try:
            return cls(pattern, n, tuple(copies))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class StructureReport:
    components: tuple[tuple[frozenset[int], tuple[int, ...]], ...]  # (vertices, hyperedge indices)
    nullities: tuple[int, ...]
    classes: tuple[str, ...]

    @property
    def has_complex(self) -> bool:
        return any(c == "complex" for c in self.classes)


# --- nullity and classification --------------------------------------------

def nullity(H: Hypergraph) -> int:
    """(r-1) e(H) + c(H) - |H| over the vertices actually spanned by hyperedges."""
    if not H.hyperedges:
        return 0
    return (H.r - 1) * H.e + len(H.component_indices()) - len(H.spanned())


def tree_replacement_nullity(H: Hypergraph) -> int:
    """Cycle rank of the multigraph obtained by replacing each hyperedge with a star."""
    parent: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cycles = 0
    for h in H.hyperedges:
        centre, *leaves = sorted(h)
        parent.setdefault(centre, centre)
        for v in leaves:
            parent.setdefault(v, v)
            a, b = find(centre), find(v)
            if a == b:
                cycles += 1
            else:
                parent[a] = b
    return cycles


def _class_of(k: int) -> str:
    return "tree" if k == 0 else "unicyclic" if k == 1 else "complex"


def classify_component(H: Hypergraph) -> str:
    if not H.hyperedges:
        raise ContractViolation("cannot classify an empty hypergraph")
    if not H.is_connected():
        raise ContractViolation("classify_component needs a connected hypergraph")
    return _class_of(nullity(H))


def structure_report(H: Hypergraph) -> StructureReport:
    comps, nulls, classes = [], [], []
    for idx in H.component_indices():
        sub = H.sub(idx)
        k = nullity(sub)
        comps.append((sub.spanned(), tuple(idx)))
        nulls.append(k)
        classes.append(_class_of(k))
    return StructureReport(tuple(comps), tuple(nulls), tuple(classes))


def is_tree_by_construction(H: Hypergraph) -> bool:
    """Grow H one hyperedge at a time, each new one touching the grown part in exactly one vertex."""
    if not H.hyperedges:
        return True
    remaining = list(H.hyperedges[1:])
    grown = set(H.hyperedges[0])
    while remaining:
        for i, h in enumerate(remaining):
            touch = len(h & grown)
            if touch == 0:
                continue
            if touch != 1:
                return False
            grown |= h
            del remaining[i]
            break
        else:
            raise ContractViolation("is_tree_by_construction needs a connected hypergraph")
    return True


# --- avoidable configurations ----------------------------------------------

def avoidable_bound(r: int) -> int:
    return 2 * comb(r, 2)


def find_avoidable_configuration(H: Hypergraph, node_cap: int = AVOIDABLE_NODE_CAP) -> Hypergraph | None:
    """Smallest connected complex sub-hypergraph with at most 2 C(r,2) hyperedges, or None.

    Components of nullity at most one cannot contain a complex
    sub-hypergraph, so only complex components are searched, breadth-first
    over connected hyperedge sets.
    """
    bound = avoidable_bound(H.r)
    nodes = 0
    for idx in H.component_indices():
        sub = H.sub(idx)
        if nullity(sub) < 2:
            continue
        hs = H.hyperedges
        by_vertex: dict[int, list[int]] = {}
        for i in idx:
            for v in hs[i]:
                by_vertex.setdefault(v, []).append(i)
        level = {frozenset([i]): (hs[i], 0) for i in idx}
        seen = set(level)
        size = 1
        while level and size < bound:
            nxt: dict[frozenset[int], tuple[frozenset[int], int]] = {}
            for members, (verts, null) in level.items():
                for j in sorted({j for v in verts for j in by_vertex[v]} - members):
                    grown = members | {j}
                    if grown in seen:
                        continue
                    seen.add(grown)
                    nodes += 1
                    if nodes > node_cap:
                        raise BudgetError(f"avoidable-configuration search exceeded {node_cap} nodes")
                    k = null + len(hs[j] & verts) - 1
                    if k >= 2:
                        return H.sub(grown)
                    nxt[grown] = (verts | hs[j], k)
            level = nxt
            size += 1
    return None


def is_avoidable_configuration(H: Hypergraph) -> bool:
    return bool(H.hyperedges) and H.is_connected() and nullity(H) >= 2 and H.e <= avoidable_bound(H.r)


# --- clean cycles ----------------------------------------------------------

def clean_cycle_core(hyperedges: Sequence[frozenset[int]]) -> frozenset[int] | None:
    """Core vertices if the hyperedges (in any order) form a clean k-cycle, else None."""
    k = len(hyperedges)
    if k < 2:
        return None
    r = len(hyperedges[0])
    if k == 2:
        common = hyperedges[0] & hyperedges[1]
        return common if len(common) == 2 else None
    if len(frozenset().union(*hyperedges)) != k * (r - 1):
        return None
    nbrs: list[list[int]] = [[] for _ in range(k)]
    core = set()
    for a, b in combinations(range(k), 2):
        common = hyperedges[a] & hyperedges[b]
        if len(common) > 1:
            return None
        if common:
            nbrs[a].append(b)
            nbrs[b].append(a)
            core |= common
    if any(len(x) != 2 for x in nbrs):
        return None
    # 2-regular intersection graph: must be a single cycle
    seen, prev, cur = {0}, None, 0
    while True:
        nxt = nbrs[cur][0] if nbrs[cur][0] != prev else nbrs[cur][1]
        if nxt == 0:
            break
        seen.add(nxt)
        prev, cur = cur, nxt
    if len(seen) != k or len(core) != k:
        return None
    return frozenset(core)


def find_clean_cycles(H: Hypergraph, k_max: int) -> list[Hypergraph]:
    """All sub-hypergraphs of H that are clean k-cycles with 2 <= k <= k_max."""
    hs = H.hyperedges
    found: list[frozenset[int]] = []
    if k_max >= 2:
        for a, b in combinations(range(H.e), 2):
            if len(hs[a] & hs[b]) == 2:
                found.append(frozenset((a, b)))
    if k_max >= 3:
        touching = [[j for j in range(H.e) if j != i and len(hs[i] & hs[j]) == 1] for i in range(H.e)]
        seen: set[frozenset[int]] = set()

        def extend(path: list[int]):
            last = path[-1]
            for j in touching[last]:
                if j <= path[0] or j in path:
                    continue
                # j may meet only `last` among path members; closing may also meet path[0]
                if any(hs[j] & hs[m] for m in path[1:-1]):
                    continue
                cyc = path + [j]
                if len(path) > 1 and hs[j] & hs[path[0]]:
                    key = frozenset(cyc)
                    if key not in seen and clean_cycle_core([hs[m] for m in cyc]) is not None:
                        seen.add(key)
                        found.append(key)
                    continue
                if len(cyc) < k_max:
                    extend(cyc)

        for start in range(H.e):
            extend([start])
    return [H.sub(sorted(idx)) for idx in found]


# --- underlying objects ----------------------------------------------------

def underlying_graph(X: Hypergraph | FGraph) -> SimpleGraph:
    edges: set[tuple[int, int]] = set()
    if isinstance(X, FGraph):
        for c in X.f_edges:
            edges |= c.edges
    else:
        for h in X.hyperedges:
            edges.update(combinations(sorted(h), 2))
    return SimpleGraph(X.ambient_n, frozenset(edges))


def to_hypergraph(H_F: FGraph) -> Hypergraph:
    return Hypergraph(H_F.pattern.r, H_F.ambient_n, tuple(c.vertices for c in H_F.f_edges))


def extra_copies(H_F: FGraph, F1: FCopy) -> list[FCopy]:
    """Copies of F inside the union graph that are not F-edges and share an edge with F1."""
    if F1 not in set(H_F.f_edges):
        raise ContractViolation("F1 must be an F-edge of H_F")
    present = {c.edges for c in H_F.f_edges}
    host = underlying_graph(H_F)
    return [c for c in copies_in(host, H_F.pattern) if c.edges not in present and c.edges & F1.edges]
