"""Exhaustive and randomized checks of the deterministic structure results.

Each sweep returns a :class:`LemmaReport`.  A candidate counterexample is
re-checked with routines that share no code with the primary check
(networkx clique and subgraph search, brute-force subset scans for complex
sub-hypergraphs) before it is reported; disagreements between the two
routes are reported as well, under their own kind.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import comb
from typing import Iterator

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from .errors import CapExceeded, ConfigError
from .graphs import (
    FCopy,
    PatternGraph,
    SimpleGraph,
    _labelled_templates,
    classify_balance,
    complete_graph,
    copies_in,
    vertex_connectivity,
)
from .hypergraph import (
    FGraph,
    Hypergraph,
    avoidable_bound,
    clean_cycle_core,
    find_avoidable_configuration,
    find_clean_cycles,
    nullity,
    to_hypergraph,
    underlying_graph,
)
from .rng import RandomStream

# (max hyperedges, max vertices) for exhaustive sweeps, by uniformity
EXHAUSTIVE_CAPS = {3: (4, 9), 4: (3, 10)}
SUBGRAPH_EDGE_CAP = 20


@dataclass(frozen=True)
class EnumerationSpec:
    """What a sweep enumerates.

    ``mode`` is ``"exhaustive"`` (every hypergraph up to isomorphism within
    the caps) or ``"random"`` (``count`` seeded instances).  Random instances
    draw their vertices from a pool whose size cycles through
    ``pool_sizes``; small pools force overlaps.
    """

    r: int
    max_hyperedges: int
    max_vertices: int
    mode: str = "exhaustive"
    count: int = 0
    seed: int = 0
    pool_sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.r < 2 or self.max_hyperedges < 1 or self.max_vertices < self.r:
            raise ConfigError("need r >= 2, at least one hyperedge and max_vertices >= r")
        if self.mode == "exhaustive":
            cap = EXHAUSTIVE_CAPS.get(self.r)
            if cap is None or self.max_hyperedges > cap[0] or self.max_vertices > cap[1]:
                raise CapExceeded(
                    f"exhaustive sweep for r={self.r} limited to {cap or 'random mode only'}"
                )
        elif self.mode == "random":
            if self.count < 0:
                raise ConfigError("count must be non-negative")
            if self.pool_sizes is not None and any(not self.r <= k <= self.max_vertices for k in self.pool_sizes):
                raise ConfigError("pool sizes must lie in [r, max_vertices]")
        else:
            raise ConfigError(f"unknown enumeration mode {self.mode!r}")

    def pools(self) -> tuple[int, ...]:
        return self.pool_sizes or tuple(range(self.r, self.max_vertices + 1))


@dataclass
class Counterexample:
    kind: str
    description: str
    witness: Hypergraph | FGraph | SimpleGraph | None = None


@dataclass
class LemmaReport:
    name: str
    instances_checked: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_text(self) -> str:
        lines = [
            f"check: {self.name}",
            f"instances_checked: {self.instances_checked}",
            f"counterexamples: {len(self.counterexamples)}",
            f"elapsed_seconds: {self.elapsed:.3f}",
        ]
        lines += [f"{k}: {v}" for k, v in sorted(self.details.items())]
        for i, ce in enumerate(self.counterexamples):
            lines.append(f"counterexample {i} [{ce.kind}]: {ce.description}")
        return "\n".join(lines) + "\n"


# --- hypergraph generation ---------------------------------------------------

def iso_classes(r: int, e: int, max_vertices: int) -> Iterator[Hypergraph]:
    """Every r-uniform multi-hypergraph with exactly e hyperedges, up to isomorphism.

    A hypergraph without isolated vertices is determined up to vertex
    relabelling by how many vertices lie in each nonempty set of hyperedges;
    a class is emitted only when its count vector is the smallest among all
    hyperedge relabellings.
    """
    masks = list(range(1, 1 << e))
    perms = list(permutations(range(e)))
    remap = [[sum(1 << p[i] for i in range(e) if m >> i & 1) for m in range(1 << e)] for p in perms]
    counts = [0] * (1 << e)
    rem = [r] * e

    def canonical() -> bool:
        base = tuple(counts[m] for m in masks)
        for table in remap[1:]:
            moved = [0] * (1 << e)
            for m in masks:
                moved[table[m]] = counts[m]
            if tuple(moved[m] for m in masks) < base:
                return False
        return True

    def build() -> Hypergraph:
        hs: list[list[int]] = [[] for _ in range(e)]
        v = 0
        for m in masks:
            for _ in range(counts[m]):
                for i in range(e):
                    if m >> i & 1:
                        hs[i].append(v)
                v += 1
        return Hypergraph(r, v, tuple(frozenset(h) for h in hs))

    def rec(pos: int, used: int) -> Iterator[Hypergraph]:
        if pos == len(masks):
            if not any(rem) and canonical():
                yield build()
            return
        m = masks[pos]
        members = [i for i in range(e) if m >> i & 1]
        top = min(min(rem[i] for i in members), max_vertices - used)
        for c in range(top, -1, -1):
            for i in members:
                rem[i] -= c
            counts[m] = c
            yield from rec(pos + 1, used + c)
            counts[m] = 0
            for i in members:
                rem[i] += c

    yield from rec(0, 0)


def _random_hypergraph(spec: EnumerationSpec, index: int) -> Hypergraph:
    rnd = RandomStream(spec.seed, index).py_random()
    pools = spec.pools()
    pool = pools[index % len(pools)]
    e = rnd.randint(1, spec.max_hyperedges)
    hs = tuple(frozenset(rnd.sample(range(pool), spec.r)) for _ in range(e))
    return Hypergraph(spec.r, pool, hs)


def hypergraphs(spec: EnumerationSpec) -> Iterator[Hypergraph]:
    if spec.mode == "exhaustive":
        for e in range(1, spec.max_hyperedges + 1):
            yield from iso_classes(spec.r, e, spec.max_vertices)
    else:
        for i in range(spec.count):
            yield _random_hypergraph(spec, i)


# --- independent routes used to confirm counterexamples ----------------------

def _nx_graph(H: Hypergraph) -> nx.Graph:
    g = nx.Graph()
    for h in H.hyperedges:
        g.add_edges_from(combinations(sorted(h), 2))
    return g


def _nx_extra_cliques(H: Hypergraph) -> set[frozenset[int]]:
    present = set(H.hyperedges)
    out = set()
    for clique in nx.enumerate_all_cliques(_nx_graph(H)):
        if len(clique) == H.r and frozenset(clique) not in present:
            out.add(frozenset(clique))
        if len(clique) > H.r:
            break
    return out


def _has_avoidable_by_subsets(H: Hypergraph) -> bool:
    """Scan every hyperedge subset of admissible size for a connected complex one."""
    bound = avoidable_bound(H.r)
    for size in range(2, min(bound, H.e) + 1):
        for idx in combinations(range(H.e), size):
            sub = H.sub(idx)
            if sub.is_connected() and nullity(sub) >= 2:
                return True
    return False


def _triangle_cycle_cores(H: Hypergraph) -> set[frozenset[int]]:
    """Cores of hyperedge triples meeting pairwise in one distinct vertex, nothing else."""
    out = set()
    for a, b, c in combinations(H.hyperedges, 3):
        ab, bc, ca = a & b, b & c, c & a
        if len(ab) == len(bc) == len(ca) == 1 and len(ab | bc | ca) == 3 and not (a & b & c):
            out.add(ab | bc | ca)
    return out


# --- extra cliques (primary route) -------------------------------------------

def extra_cliques(H: Hypergraph) -> list[frozenset[int]]:
    """Vertex sets of r-cliques in the clique replacement of H that are not hyperedges."""
    present = set(H.hyperedges)
    return [c.vertices for c in copies_in(underlying_graph(H), complete_graph(H.r)) if c.vertices not in present]


def verify_lemma2(spec: EnumerationSpec) -> LemmaReport:
    """For r >= 4: avoidable-free hypergraphs have no extra r-cliques."""
    if spec.r < 4:
        raise ConfigError("the clique statement needs r >= 4; use verify_r3_exception for r = 3")
    report = LemmaReport("clique-extras", details={"avoidable_free": 0, "mode": spec.mode})
    start = time.perf_counter()
    for H in hypergraphs(spec):
        report.instances_checked += 1
        if find_avoidable_configuration(H) is not None:
            continue
        report.details["avoidable_free"] += 1
        extras = extra_cliques(H)
        if extras:
            _confirm_clique_counterexample(report, H, set(extras))
    report.elapsed = time.perf_counter() - start
    return report


def _confirm_clique_counterexample(report: LemmaReport, H: Hypergraph, extras: set[frozenset[int]]) -> None:
    if _nx_extra_cliques(H) == extras and not _has_avoidable_by_subsets(H):
        report.counterexamples.append(Counterexample(
            "extra-clique", f"extra cliques {[sorted(x) for x in extras]} without an avoidable configuration", H))
    else:
        report.counterexamples.append(Counterexample(
            "route-disagreement", "independent routes disagree on this instance", H))


def verify_r3_exception(spec: EnumerationSpec) -> LemmaReport:
    """For r = 3: every extra triangle is the core of a clean 3-cycle."""
    if spec.r != 3:
        raise ConfigError("the triangle exception concerns r = 3")
    report = LemmaReport("triangle-cycles",
                         details={"avoidable_free": 0, "extra_triangles": 0, "witnessed": 0, "mode": spec.mode})
    start = time.perf_counter()
    for H in hypergraphs(spec):
        report.instances_checked += 1
        if find_avoidable_configuration(H) is not None:
            continue
        report.details["avoidable_free"] += 1
        extras = set(extra_cliques(H))
        if not extras:
            continue
        cores = {clean_cycle_core(C.hyperedges) for C in find_clean_cycles(H, 3) if C.e == 3}
        report.details["extra_triangles"] += len(extras)
        report.details["witnessed"] += len(extras & cores)
        bad = extras - cores
        if bad:
            independent = _nx_extra_cliques(H) - _triangle_cycle_cores(H)
            kind = "unwitnessed-triangle" if independent == bad else "route-disagreement"
            report.counterexamples.append(Counterexample(
                kind, f"extra triangles {[sorted(x) for x in bad]} not witnessed by a clean 3-cycle", H))
    report.elapsed = time.perf_counter() - start
    return report


# --- the counting inequality -------------------------------------------------

def bd_multisets(r: int) -> Iterator[tuple[int, ...]]:
    """Multisets of intersection sizes in [2, r-1], at most C(r,2) of them, covering C(r,2) pairs."""
    target = comb(r, 2)
    values = list(range(r - 1, 1, -1))

    def rec(pos: int, chosen: list[int], pairs: int) -> Iterator[tuple[int, ...]]:
        if pos == len(values):
            if chosen and pairs >= target:
                yield tuple(chosen)
            return
        v = values[pos]
        room = target - len(chosen)
        for c in range(room + 1):
            yield from rec(pos + 1, chosen + [v] * c, pairs + c * comb(v, 2))

    yield from rec(0, [], 0)


def _covering_placement(r: int, t: int) -> tuple[frozenset[int], ...] | None:
    """t subsets of size r-1 of [r] whose pairs cover all of K_r, if any."""
    blocks = [frozenset(b) for b in combinations(range(r), r - 1)]
    pairs = {frozenset(p) for p in combinations(range(r), 2)}
    for choice in combinations(blocks, t):
        covered = set()
        for b in choice:
            covered |= {frozenset(p) for p in combinations(sorted(b), 2)}
        if covered >= pairs:
            return choice
    return None


def verify_bd_inequality(r: int, random_checks: int = 2000, seed: int = 0) -> LemmaReport:
    """Check the pair-counting chain for intersection sizes against K_r.

    For every admissible multiset, the excess sum of (s_i - 1) is at least
    r; equality needs every s_i = r - 1, and for r >= 4 no such family of
    (r-1)-sets covers K_r.  A randomized part assembles the configurations
    and compares the excess sum with their nullity.
    """
    if not 3 <= r <= 8:
        raise ConfigError("r must lie in [3, 8]")
    report = LemmaReport(f"pair-count-r{r}", details={"equality_cases": [], "random_assemblies": 0})
    start = time.perf_counter()
    for ms in bd_multisets(r):
        report.instances_checked += 1
        if max(ms) >= r or min(ms) < 2:
            report.counterexamples.append(Counterexample("generator", f"multiset {ms} outside [2, r-1]"))
            continue
        excess = sum(s - 1 for s in ms)
        if excess < r:
            report.counterexamples.append(Counterexample("inequality", f"multiset {ms}: excess {excess} < {r}"))
        elif excess == r:
            report.details["equality_cases"].append(ms)
            if any(s != r - 1 for s in ms):
                report.counterexamples.append(Counterexample("equality", f"multiset {ms} attains equality"))
            elif r >= 4:
                placement = _covering_placement(r, len(ms))
                if placement is not None:
                    report.counterexamples.append(Counterexample(
                        "equality", f"multiset {ms} covers K_{r} via {[sorted(b) for b in placement]}"))
    rnd = RandomStream(seed, r).py_random()
    h = frozenset(range(r))
    for _ in range(random_checks):
        t = rnd.randint(1, comb(r, 2))
        pool = list(range(r, r + rnd.randint(1, 2 * r)))
        hs = [h]
        excess = 0
        for _ in range(t):
            s = rnd.randint(2, r - 1)
            outside = r - s
            if outside > len(pool):
                pool += list(range(pool[-1] + 1, pool[-1] + 1 + outside - len(pool)))
            hs.append(frozenset(rnd.sample(range(r), s)) | frozenset(rnd.sample(pool, outside)))
            excess += s - 1
        C = Hypergraph(r, max(pool) + 1, tuple(hs))
        report.details["random_assemblies"] += 1
        if nullity(C) < excess:
            report.counterexamples.append(Counterexample(
                "assembly", f"nullity {nullity(C)} below excess {excess}", C))
    report.elapsed = time.perf_counter() - start
    return report


# --- F-graphs ----------------------------------------------------------------

def _random_fgraph(pattern: PatternGraph, spec: EnumerationSpec, index: int) -> FGraph:
    """Random F-graph biased toward overlaps.

    Half of the instances place every copy inside a small pool; the other
    half grow the F-graph by attaching each new copy along one or two
    existing vertices, which produces trees and clean cycles.
    """
    rnd = RandomStream(spec.seed, index).py_random()
    pools = spec.pools()
    pool = pools[index % len(pools)]
    r = pattern.r
    m = rnd.randint(2, spec.max_hyperedges) if spec.max_hyperedges >= 2 else 1
    copies: dict[frozenset, FCopy] = {}
    if index % 2 == 0:
        n = pool
        for _ in range(4 * m):
            if len(copies) == m:
                break
            c = FCopy.from_image(pattern, rnd.sample(range(pool), r))
            copies.setdefault(c.edges, c)
    else:
        used: list[int] = []
        n = 0
        for _ in range(m):
            shared = rnd.sample(used, min(len(used), rnd.choice((1, 2)))) if used else []
            fresh = list(range(n, n + r - len(shared)))
            n += len(fresh)
            img = shared + fresh
            rnd.shuffle(img)
            c = FCopy.from_image(pattern, img)
            if c.edges not in copies:
                copies[c.edges] = c
                used += fresh
    return FGraph(pattern, max(n, r), tuple(copies.values()))


def fgraph_extras(H_F: FGraph) -> list[FCopy]:
    """Copies of the pattern in the union graph that are not F-edges."""
    present = {c.edges for c in H_F.f_edges}
    return [c for c in copies_in(underlying_graph(H_F), H_F.pattern) if c.edges not in present]


def _nx_extras(H_F: FGraph) -> set[frozenset]:
    host = nx.Graph()
    for c in H_F.f_edges:
        host.add_edges_from(c.edges)
    pat = nx.Graph(list(H_F.pattern.graph.edges))
    present = {c.edges for c in H_F.f_edges}
    out = set()
    for mapping in GraphMatcher(host, pat).subgraph_monomorphisms_iter():
        inv = {v: k for k, v in mapping.items()}
        es = frozenset(tuple(sorted((inv[u], inv[v]))) for u, v in pat.edges)
        if es not in present:
            out.add(es)
    return out


def _witnesses(H_F: FGraph, F0: FCopy) -> list[Hypergraph]:
    hyper = to_hypergraph(H_F)
    out = []
    for C in find_clean_cycles(hyper, H_F.pattern.s):
        if all(any({u, v} <= h for h in C.hyperedges) for u, v in F0.edges):
            out.append(C)
    return out


def verify_lemma8(pattern: PatternGraph, spec: EnumerationSpec) -> LemmaReport:
    """Extra copies in avoidable-free F-graphs are covered by a clean k-cycle, k <= e(F).

    For a nice pattern no extra copy may appear at all.
    """
    if vertex_connectivity(pattern.graph) < 2:
        raise ConfigError("pattern must be 2-connected")
    if spec.mode != "random":
        raise ConfigError("F-graph sweeps run in random mode")
    if spec.r != pattern.r:
        raise ConfigError("spec.r must equal the pattern's vertex count")
    nice = pattern.classification.nice
    report = LemmaReport(f"extra-copy-{pattern.name}",
                         details={"avoidable_free": 0, "extra_copies": 0, "witnessed": 0, "nice": nice})
    start = time.perf_counter()
    for i in range(spec.count):
        H_F = _random_fgraph(pattern, spec, i)
        report.instances_checked += 1
        if find_avoidable_configuration(to_hypergraph(H_F)) is not None:
            continue
        report.details["avoidable_free"] += 1
        extras = fgraph_extras(H_F)
        if not extras:
            continue
        report.details["extra_copies"] += len(extras)
        if {c.edges for c in extras} != _nx_extras(H_F) or _has_avoidable_by_subsets(to_hypergraph(H_F)):
            report.counterexamples.append(Counterexample("route-disagreement", "extra-copy routes disagree", H_F))
            continue
        if nice:
            report.counterexamples.append(Counterexample(
                "nice-extra", f"{len(extras)} extra copies without an avoidable configuration", H_F))
            continue
        for F0 in extras:
            if _witnesses(H_F, F0):
                report.details["witnessed"] += 1
            else:
                report.counterexamples.append(Counterexample(
                    "unwitnessed-copy", f"extra copy {F0.key} has no covering clean cycle", H_F))
    report.elapsed = time.perf_counter() - start
    return report


@dataclass
class MFBound:
    lower_bound: int
    certified_zero: bool
    decorations_checked: int
    exhaustive: bool
    witness: FGraph | None = None
    witness_edge: int | None = None
    counterexamples: list[Counterexample] = field(default_factory=list)


def clean_cycle_skeleton(r: int, k: int) -> tuple[int, tuple[frozenset[int], ...]]:
    """Vertex count and hyperedges of a clean k-cycle on fresh labels."""
    if k < 2:
        raise ConfigError("clean cycles need k >= 2")
    if k == 2:
        a = frozenset({0, 1} | set(range(2, r)))
        b = frozenset({0, 1} | set(range(r, 2 * r - 2)))
        return 2 * r - 2, (a, b)
    hs = []
    nxt = k
    for i in range(k):
        hs.append(frozenset({i, (i + 1) % k} | set(range(nxt, nxt + r - 2))))
        nxt += r - 2
    return nxt, tuple(hs)


def bound_MF(pattern: PatternGraph, budget: int = 5000, seed: int = 0) -> MFBound:
    """Lower bound on the extra-copy supremum from decorated clean cycles.

    Every clean k-cycle with 2 <= k <= e(F) is decorated with one copy of
    F per hyperedge, exhaustively when at most ``budget`` decorations exist
    and by ``budget`` seeded random draws otherwise.  Returns the largest
    number of extra copies meeting a single F-edge.  For a nice pattern the
    value 0 is certified, and anything found is reported as a counterexample.
    """
    if vertex_connectivity(pattern.graph) < 2:
        raise ConfigError("pattern must be 2-connected")
    r = pattern.r
    templates = [es for _, es in _labelled_templates(pattern)]
    rnd = RandomStream(seed, 0xF).py_random()
    best = 0
    witness = None
    witness_edge = None
    checked = 0
    exhaustive = True
    for k in range(2, pattern.s + 1):
        n, hs = clean_cycle_skeleton(r, k)
        total = len(templates) ** k
        if total <= budget:
            choices = product(range(len(templates)), repeat=k)
        else:
            exhaustive = False
            choices = (tuple(rnd.randrange(len(templates)) for _ in range(k)) for _ in range(budget))
        for choice in choices:
            copies = []
            for h, t in zip(hs, choice):
                order = sorted(h)
                img = tuple(order[x] for x in _template_image(pattern, t))
                copies.append(FCopy.from_image(pattern, img))
            H_F = FGraph(pattern, n, tuple(copies))
            if find_avoidable_configuration(to_hypergraph(H_F)) is not None:
                raise AssertionError("a decorated clean cycle must be avoidable-free")
            checked += 1
            extras = fgraph_extras(H_F)
            for idx, F1 in enumerate(copies):
                count = sum(1 for c in extras if c.edges & F1.edges)
                if count > best:
                    best, witness, witness_edge = count, H_F, idx
    nice = pattern.classification.nice
    out = MFBound(best, nice and best == 0, checked, exhaustive, witness, witness_edge)
    if nice and best:
        out.counterexamples.append(Counterexample("nice-extra", f"{best} extra copies meet one F-edge", witness))
    return out


def _template_image(pattern: PatternGraph, t: int) -> tuple[int, ...]:
    return _labelled_templates(pattern)[t][0]


# --- subgraph density inequality ---------------------------------------------

def verify_mbd(pattern: PatternGraph) -> LemmaReport:
    """e(S) <= s - d1*k for every spanning subgraph S of F with k+1 components.

    Strict whenever some component has between 2 and r-1 vertices and F is
    strictly 1-balanced.
    """
    balance = classify_balance(pattern)
    if not balance["one_balanced"]:
        raise ConfigError("pattern must be 1-balanced")
    edges = sorted(pattern.graph.edges)
    if len(edges) > SUBGRAPH_EDGE_CAP:
        raise CapExceeded(f"subgraph enumeration limited to {SUBGRAPH_EDGE_CAP} edges")
    r, s, d1 = pattern.r, pattern.s, pattern.d1
    strict = balance["strictly_one_balanced"]
    report = LemmaReport(f"subgraph-density-{pattern.name}", details={"strict_cases": 0})
    start = time.perf_counter()
    for bits in range(1, 1 << len(edges)):
        chosen = [edges[i] for i in range(len(edges)) if bits >> i & 1]
        parent = list(range(r))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in chosen:
            parent[find(u)] = find(v)
        sizes: dict[int, int] = {}
        for v in range(r):
            root = find(v)
            sizes[root] = sizes.get(root, 0) + 1
        k = len(sizes) - 1
        m = len(chosen)
        bound = s - d1 * k
        report.instances_checked += 1
        witness = SimpleGraph(r, frozenset(chosen))
        if m > bound:
            report.counterexamples.append(Counterexample("density", f"{m} edges > {bound} with k={k}", witness))
        elif strict and any(2 <= z <= r - 1 for z in sizes.values()):
            report.details["strict_cases"] += 1
            if m == bound:
                report.counterexamples.append(Counterexample("strictness", f"{m} edges = {bound} with k={k}", witness))
    report.elapsed = time.perf_counter() - start
    return report


# --- classifier table ----------------------------------------------------------

def verify_balance_connectivity(max_vertices: int = 7) -> LemmaReport:
    """Strictly 1-balanced connected graphs are 2-connected, over the graph atlas."""
    if not 2 <= max_vertices <= 7:
        raise ConfigError("the atlas covers graphs on at most 7 vertices")
    report = LemmaReport("balance-connectivity", details={"strict": 0})
    start = time.perf_counter()
    for g in nx.graph_atlas_g():
        if g.number_of_nodes() < 2 or g.number_of_nodes() > max_vertices or not nx.is_connected(g):
            continue
        pat = PatternGraph(SimpleGraph.from_edges(g.number_of_nodes(), g.edges()))
        report.instances_checked += 1
        if classify_balance(pat)["strictly_one_balanced"]:
            report.details["strict"] += 1
            if nx.node_connectivity(g) < 2 and g.number_of_nodes() > 2:
                report.counterexamples.append(Counterexample(
                    "connectivity", "strictly 1-balanced but not 2-connected", pat.graph))
    report.elapsed = time.perf_counter() - start
    return report


def classifier_table(patterns: list[PatternGraph]) -> list[dict]:
    rows = []
    for pat in patterns:
        cls = pat.classification
        rows.append({
            "pattern": pat.name,
            "r": pat.r,
            "s": pat.s,
            "d1": str(pat.d1),
            "one_balanced": cls.one_balanced,
            "strictly_one_balanced": cls.strictly_one_balanced,
            "two_connected": cls.two_connected,
            "three_connected": cls.three_connected,
            "edge_swap_rigid": cls.edge_swap_rigid,
            "nice": cls.nice,
        })
    return rows


__all__ = [
    "EXHAUSTIVE_CAPS",
    "Counterexample",
    "EnumerationSpec",
    "LemmaReport",
    "MFBound",
    "bd_multisets",
    "bound_MF",
    "classifier_table",
    "clean_cycle_skeleton",
    "extra_cliques",
    "fgraph_extras",
    "hypergraphs",
    "iso_classes",
    "verify_balance_connectivity",
    "verify_bd_inequality",
    "verify_lemma2",
    "verify_lemma8",
    "verify_mbd",
    "verify_r3_exception",
]
