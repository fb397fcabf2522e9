"""Simple graphs, pattern graphs and their copies in K_n.

Patterns are tiny (at most ``PATTERN_CAP`` vertices), so isomorphism,
automorphisms and subgraph embeddings are all done by backtracking with
degree pruning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import CapExceeded, DivisibilityError, InvalidPattern
from .rng import RandomStream

PATTERN_CAP = 10

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SimpleGraph:
    vertex_count: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        clean = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge {(u, v)} out of range for n={self.vertex_count}")
            clean.add(norm_edge(u, v))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "SimpleGraph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def complete(cls, n: int) -> "SimpleGraph":
        return cls(n, frozenset(combinations(range(n), 2)))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edges

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.vertex_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def is_connected(self) -> bool:
        if self.vertex_count <= 1:
            return True
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def relabel(self, mapping) -> "SimpleGraph":
        return SimpleGraph(self.vertex_count, frozenset(norm_edge(mapping[u], mapping[v]) for u, v in self.edges))

    def to_text(self) -> str:
        lines = [f"{self.vertex_count} {self.edge_count}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SimpleGraph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows:
            raise InvalidPattern("empty edge-list")
        try:
            n, m = int(rows[0][0]), int(rows[0][1])
            edges = [(int(a), int(b)) for a, b in rows[1:]]
        except (ValueError, IndexError) as exc:
            raise InvalidPattern(f"malformed edge-list: {exc}") from None
        if len(edges) != m:
            raise InvalidPattern(f"header announces {m} edges, found {len(edges)}")
        try:
            g = cls.from_edges(n, edges)
        except ValueError as exc:
            raise InvalidPattern(str(exc)) from None
        if g.edge_count != m:
            raise InvalidPattern("duplicate edges in edge-list")
        return g


@dataclass(frozen=True)
class Classification:
    one_balanced: bool
    strictly_one_balanced: bool
    two_connected: bool
    three_connected: bool
    edge_swap_rigid: bool
    nice: bool


@dataclass(frozen=True)
class PatternGraph:
    """A connected pattern F together with its derived invariants."""

    graph: SimpleGraph
    name: str = ""

    def __post_init__(self):
        if self.graph.vertex_count < 2:
            raise InvalidPattern("a pattern needs at least two vertices")
        if not self.graph.is_connected():
            raise InvalidPattern("pattern graphs must be connected")

    @property
    def r(self) -> int:
        return self.graph.vertex_count

    @property
    def s(self) -> int:
        return self.graph.edge_count

    @property
    def d1(self) -> Fraction:
        return Fraction(self.s, self.r - 1)

    @cached_property
    def aut_count(self) -> int:
        return automorphism_count(self)

    @cached_property
    def classification(self) -> Classification:
        bal = classify_balance(self)
        kappa = vertex_connectivity(self.graph)
        rigid = edge_swap_rigid(self)
        return Classification(
            one_balanced=bal["one_balanced"],
            strictly_one_balanced=bal["strictly_one_balanced"],
            two_connected=kappa >= 2,
            three_connected=kappa >= 3,
            edge_swap_rigid=rigid,
            nice=bal["strictly_one_balanced"] and kappa >= 3 and rigid,
        )

    @property
    def is_complete(self) -> bool:
        return self.s == self.r * (self.r - 1) // 2

    def __str__(self) -> str:
        return self.name or f"F({self.r},{self.s})"


@dataclass(frozen=True, eq=False)
class FCopy:
    """A copy of a pattern in K_n; identity is the edge set."""

    vertex_image: tuple[int, ...]
    edges: frozenset[Edge]
    pattern: PatternGraph | None = field(default=None, repr=False)

    @classmethod
    def from_image(cls, pattern: "PatternGraph", image: Sequence[int]) -> "FCopy":
        img = tuple(image)
        return cls(img, frozenset(norm_edge(img[u], img[v]) for u, v in pattern.graph.edges), pattern)

    def __eq__(self, other):
        return isinstance(other, FCopy) and self.edges == other.edges

    def __hash__(self):
        return hash(self.edges)

    @cached_property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.vertex_image)

    @cached_property
    def key(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))


def _as_graph(x) -> SimpleGraph:
    return x.graph if isinstance(x, PatternGraph) else x


# --- named patterns -------------------------------------------------------

def complete_graph(r: int) -> PatternGraph:
    return PatternGraph(SimpleGraph.complete(r), f"K{r}")


def cycle_graph(k: int) -> PatternGraph:
    return PatternGraph(SimpleGraph.from_edges(k, [(i, (i + 1) % k) for i in range(k)]), f"C{k}")


def path_graph(k: int) -> PatternGraph:
    return PatternGraph(SimpleGraph.from_edges(k, [(i, i + 1) for i in range(k - 1)]), f"P{k}")


def petersen_graph() -> PatternGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return PatternGraph(SimpleGraph.from_edges(10, outer + spokes + inner), "petersen")


def bowtie_graph() -> PatternGraph:
    return PatternGraph(SimpleGraph.from_edges(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)]), "bowtie")


_NAMED = re.compile(r"^([KCP])(\d+)$")


def named_pattern(name: str) -> PatternGraph:
    """``Kk``, ``Ck`` or ``Pk`` with k up to PATTERN_CAP, ``petersen`` or ``bowtie``."""
    low = name.strip()
    if low.lower() == "petersen":
        return petersen_graph()
    if low.lower() == "bowtie":
        return bowtie_graph()
    m = _NAMED.match(low.upper())
    if not m:
        raise InvalidPattern(f"unknown pattern name {name!r}")
    kind, k = m.group(1), int(m.group(2))
    if k > PATTERN_CAP:
        raise InvalidPattern(f"pattern {name} exceeds the {PATTERN_CAP}-vertex cap")
    if kind == "K" and k >= 2:
        return complete_graph(k)
    if kind == "C" and k >= 3:
        return cycle_graph(k)
    if kind == "P" and k >= 2:
        return path_graph(k)
    raise InvalidPattern(f"unknown pattern name {name!r}")


def load_pattern(spec: str) -> PatternGraph:
    """A built-in name, or a path to an edge-list file."""
    from pathlib import Path

    path = Path(spec)
    if path.is_file():
        return PatternGraph(SimpleGraph.from_text(path.read_text()), path.stem)
    return named_pattern(spec)


# --- classification -------------------------------------------------------

def one_density(F) -> Fraction:
    g = _as_graph(F)
    if g.vertex_count < 2:
        raise InvalidPattern("1-density needs at least two vertices")
    return Fraction(g.edge_count, g.vertex_count - 1)


def _induced_edge_counts(g: SimpleGraph) -> dict[int, int]:
    """Edge count of the induced subgraph on every vertex subset (bitmask)."""
    n = g.vertex_count
    nbr = [0] * n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    counts = {0: 0}
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << low)
        counts[mask] = counts[rest] + bin(nbr[low] & rest).count("1")
    return counts


def classify_balance(F) -> dict[str, bool]:
    """1-balanced / strictly 1-balanced, checked on induced subgraphs only.

    On a fixed vertex set the induced subgraph has the most edges, so it
    is the only candidate that can beat the density of F.
    """
    g = _as_graph(F)
    n = g.vertex_count
    if n < 2:
        raise InvalidPattern("balance needs at least two vertices")
    d1 = one_density(g)
    full = (1 << n) - 1
    balanced = strict = True
    for mask, e in _induced_edge_counts(g).items():
        k = bin(mask).count("1")
        if k < 2:
            continue
        d = Fraction(e, k - 1)
        if d > d1:
            balanced = strict = False
            break
        if d == d1 and mask != full:
            strict = False
    return {"one_balanced": balanced, "strictly_one_balanced": strict}


def vertex_connectivity(G) -> int:
    g = _as_graph(G)
    n = g.vertex_count
    if not g.is_connected() or n == 0:
        return 0
    if g.edge_count == n * (n - 1) // 2:
        return n - 1
    adj = g.adjacency()
    for k in range(1, n - 1):
        for cut in combinations(range(n), k):
            removed = set(cut)
            rest = [v for v in range(n) if v not in removed]
            seen = {rest[0]}
            stack = [rest[0]]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in removed and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) < len(rest):
                return k
    return n - 1


def _search_order(adj: list[set[int]]) -> list[int]:
    """Vertex order in which each vertex after the first of its component has an earlier neighbour."""
    n = len(adj)
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < n:
        start = max((v for v in range(n) if v not in placed), key=lambda v: len(adj[v]))
        order.append(start)
        placed.add(start)
        while True:
            frontier = [v for v in range(n) if v not in placed and adj[v] & placed]
            if not frontier:
                break
            nxt = max(frontier, key=lambda v: (len(adj[v] & placed), len(adj[v])))
            order.append(nxt)
            placed.add(nxt)
    return order


def _embeddings(pattern: SimpleGraph, host: SimpleGraph, exact_degree: bool = False) -> Iterator[tuple[int, ...]]:
    """Injective edge-preserving maps V(pattern) -> V(host)."""
    padj = pattern.adjacency()
    hadj = host.adjacency()
    pdeg = [len(a) for a in padj]
    hdeg = [len(a) for a in hadj]
    order = _search_order(padj)
    pos = {v: i for i, v in enumerate(order)}
    anchors = [[w for w in padj[u] if pos[w] < pos[u]] for u in order]
    image = [-1] * pattern.vertex_count
    used = [False] * host.vertex_count

    def fits(u: int, x: int) -> bool:
        if used[x]:
            return False
        if exact_degree:
            return hdeg[x] == pdeg[u]
        return hdeg[x] >= pdeg[u]

    def rec(k: int):
        if k == len(order):
            yield tuple(image)
            return
        u = order[k]
        anc = anchors[k]
        if anc:
            cands = hadj[image[anc[0]]]
            rest = anc[1:]
        else:
            cands = range(host.vertex_count)
            rest = ()
        for x in cands:
            if not fits(u, x):
                continue
            if any(x not in hadj[image[w]] for w in rest):
                continue
            image[u] = x
            used[x] = True
            yield from rec(k + 1)
            used[x] = False
        image[u] = -1

    yield from rec(0)


def is_isomorphic(g1: SimpleGraph, g2: SimpleGraph) -> bool:
    if g1.vertex_count != g2.vertex_count or g1.edge_count != g2.edge_count:
        return False
    if sorted(g1.degrees()) != sorted(g2.degrees()):
        return False
    return next(_embeddings(g1, g2, exact_degree=True), None) is not None


def automorphism_count(F, cap: int = PATTERN_CAP) -> int:
    g = _as_graph(F)
    if g.vertex_count > cap:
        raise CapExceeded(f"automorphism count capped at {cap} vertices")
    return sum(1 for _ in _embeddings(g, g, exact_degree=True))


def edge_swap_rigid(F) -> bool:
    """True iff no single add-one-edge/delete-one-edge move yields a graph isomorphic to F."""
    g = _as_graph(F)
    non_edges = [e for e in combinations(range(g.vertex_count), 2) if e not in g.edges]
    base_degrees = sorted(g.degrees())
    for plus in non_edges:
        for minus in g.edges:
            moved = SimpleGraph(g.vertex_count, (g.edges - {minus}) | {plus})
            if sorted(moved.degrees()) != base_degrees:
                continue
            if is_isomorphic(moved, g):
                return False
    return True


def is_nice(F) -> bool:
    pat = F if isinstance(F, PatternGraph) else PatternGraph(F)
    return pat.classification.nice


# --- copies ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _labelled_templates(pattern: PatternGraph) -> tuple[tuple[tuple[int, ...], frozenset[Edge]], ...]:
    """Distinct copies of F on vertex set {0..r-1}, each with its smallest vertex map."""
    best: dict[frozenset[Edge], tuple[int, ...]] = {}
    full = SimpleGraph.complete(pattern.r)
    for img in _embeddings(pattern.graph, full):
        es = frozenset(norm_edge(img[u], img[v]) for u, v in pattern.graph.edges)
        if es not in best or img < best[es]:
            best[es] = img
    return tuple((img, es) for es, img in best.items())


@lru_cache(maxsize=64)
def enumerate_copies(pattern: PatternGraph, n: int) -> tuple[FCopy, ...]:
    """All C(n,r) r!/aut(F) copies of F in K_n, sorted by their sorted edge lists."""
    r = pattern.r
    if n < r:
        return ()
    templates = _labelled_templates(pattern)
    out = []
    for subset in combinations(range(n), r):
        for img, es in templates:
            out.append(FCopy(
                tuple(subset[x] for x in img),
                frozenset(norm_edge(subset[u], subset[v]) for u, v in es),
                pattern,
            ))
    out.sort(key=lambda c: c.key)
    return tuple(out)


def copies_in(host: SimpleGraph, pattern: PatternGraph) -> list[FCopy]:
    """Every copy of F whose edges all lie in ``host``, in canonical order."""
    best: dict[frozenset[Edge], tuple[int, ...]] = {}
    for img in _embeddings(pattern.graph, host):
        es = frozenset(norm_edge(img[u], img[v]) for u, v in pattern.graph.edges)
        if es not in best or img < best[es]:
            best[es] = img
    out = [FCopy(img, es, pattern) for es, img in best.items()]
    out.sort(key=lambda c: c.key)
    return out


def sample_gnp(n: int, p: Fraction, rng: RandomStream) -> SimpleGraph:
    """G(n,p) with exact coins, one per pair in lexicographic order."""
    p = Fraction(p)
    edges = [e for e in combinations(range(n), 2) if rng.bernoulli(p)]
    return SimpleGraph(n, frozenset(edges))


def find_factor_direct(G: SimpleGraph, pattern: PatternGraph) -> list[FCopy] | None:
    """Exact F-factor search by backtracking over copies of F in G."""
    n, r = G.vertex_count, pattern.r
    if n % r:
        raise DivisibilityError(f"|F|={r} does not divide n={n}")
    if n == 0:
        return []
    copies = copies_in(G, pattern)
    masks = []
    by_vertex: list[list[int]] = [[] for _ in range(n)]
    seen_masks: dict[int, int] = {}
    for idx, c in enumerate(copies):
        m = 0
        for v in c.vertices:
            m |= 1 << v
        if m in seen_masks:
            continue  # one copy per vertex set is enough for a factor
        seen_masks[m] = idx
        masks.append((m, idx))
        for v in c.vertices:
            by_vertex[v].append(len(masks) - 1)
    full = (1 << n) - 1
    chosen: list[int] = []

    def rec(covered: int) -> bool:
        if covered == full:
            return True
        best = None
        for v in range(n):
            if covered >> v & 1:
                continue
            opts = [k for k in by_vertex[v] if not masks[k][0] & covered]
            if best is None or len(opts) < len(best):
                best = opts
                if not opts:
                    return False
        for k in best:
            chosen.append(k)
            if rec(covered | masks[k][0]):
                return True
            chosen.pop()
        return False

    if not rec(0):
        return None
    return [copies[masks[k][1]] for k in chosen]
