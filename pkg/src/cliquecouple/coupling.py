"""Sequential coupling of G(n,p) with the random F-graph H_F(n,pi).

Copies of F are tested one at a time.  At step j the engine computes the
exact conditional probability pi_j that copy j is present given the test
outcomes so far.  When pi_j >= pi, copy j is tested with probability
pi / pi_j and included in H iff the test succeeds; otherwise it is included
with probability pi regardless of G, and an inclusion there breaks the
coupling.  Either way copy j enters H with probability exactly pi.

Thinned mode gives every copy a private coin of bias c; a test then
succeeds iff the copy is present in G and its coin is up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .conditional import (
    SHANNON_VAR_CAP,
    ConditionalEngine,
    ConditionalQuery,
    HistoryConstraint,
    all_edges,
    pi_lower_bound,
    q_statistic,
)
from .errors import ConfigError, InvalidConstants
from .graphs import FCopy, PatternGraph, SimpleGraph, enumerate_copies, sample_gnp
from .hypergraph import FGraph, find_avoidable_configuration, to_hypergraph, underlying_graph
from .rng import RandomStream

NORMAL, DANGEROUS, DEADLY = "normal", "dangerous", "deadly"


def derive_pi(pattern: PatternGraph, p: Fraction, mode: str = "plain", *, beta: Fraction | None = None,
              a: Fraction | None = None, c: Fraction | None = None, m_f: int | None = None) -> Fraction:
    """Target hyperedge density.

    plain:   (1 - beta) p^s
    thinned: a p^s with c(1-c) > a; when ``m_f`` is given instead of (a, c),
             c = 1/(2(m_f + 1)) and a = c/2.
    """
    p = Fraction(p)
    ps = p ** pattern.s
    if mode == "plain":
        beta = Fraction(beta if beta is not None else Fraction(1, 2))
        if not 0 <= beta < 1:
            raise InvalidConstants(f"slack beta={beta} must lie in [0,1)")
        return (1 - beta) * ps
    if mode != "thinned":
        raise ConfigError(f"unknown mode {mode!r}")
    if m_f is not None and a is None and c is None:
        a, c = thinning_constants(m_f)
    if a is None or c is None:
        raise InvalidConstants("thinned mode needs (a, c) or m_f")
    a, c = Fraction(a), Fraction(c)
    if not 0 < c < 1:
        raise InvalidConstants(f"thinning c={c} must lie in (0,1)")
    if a <= 0:
        raise InvalidConstants(f"a={a} must be positive")
    if pattern.is_complete and pattern.r == 3 and a >= Fraction(1, 4):
        raise InvalidConstants(f"the triangle coupling needs a < 1/4, got {a}")
    if c * (1 - c) <= a:
        raise InvalidConstants(f"c(1-c)={c * (1 - c)} must exceed a={a}")
    return a * ps


def thinning_constants(m_f: int) -> tuple[Fraction, Fraction]:
    """(a, c) with C = m_f + 1, c = 1/(2C), a = c/2."""
    c = Fraction(1, 2 * (m_f + 1))
    return c / 2, c


def default_delta(n: int, pattern: PatternGraph, pi: Fraction) -> int:
    """3 r ceil(max(1, expected H-degree)) + r."""
    r = pattern.r
    if n < r:
        return r
    per_vertex = Fraction(math.comb(n, r) * math.factorial(r), pattern.aut_count) * r / n
    return 3 * r * math.ceil(max(Fraction(1), pi * per_vertex)) + r


@dataclass(frozen=True)
class CouplingConfig:
    n: int
    pattern: PatternGraph
    p: Fraction
    pi: Fraction
    thinning: Fraction | None = None
    copy_order: str = "canonical"
    delta_cap: int | None = None
    var_cap: int = SHANNON_VAR_CAP

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "pi", Fraction(self.pi))
        if self.thinning is not None:
            object.__setattr__(self, "thinning", Fraction(self.thinning))
            if not 0 < self.thinning <= 1:
                raise InvalidConstants("thinned mode needs c in (0,1]")
        if not 0 <= self.p <= 1 or not 0 <= self.pi <= 1:
            raise InvalidConstants("p and pi must lie in [0,1]")
        if self.copy_order not in ("canonical", "shuffle"):
            raise ConfigError(f"unknown copy order {self.copy_order!r}")

    @property
    def mode(self) -> str:
        return "plain" if self.thinning is None else "thinned"

    @property
    def delta(self) -> int:
        return self.delta_cap if self.delta_cap is not None else default_delta(self.n, self.pattern, self.pi)


@dataclass(frozen=True)
class StepRecord:
    step: int
    copy_index: int
    missing: int
    pi_j: Fraction
    q_j: Fraction
    lower_bound: Fraction
    dangerous_count: int
    klass: str
    tested: bool
    test_passed: bool | None
    included: bool
    failing: bool
    inclusion_probability: Fraction

    def as_json(self) -> dict:
        return {
            "step": self.step,
            "copy": self.copy_index,
            "missing": self.missing,
            "pi_j": str(self.pi_j),
            "Q_j": str(self.q_j),
            "lower_bound": str(self.lower_bound),
            "class": self.klass,
            "tested": self.tested,
            "test_passed": self.test_passed,
            "included": self.included,
        }


@dataclass
class CouplingResult:
    config: CouplingConfig
    G: SimpleGraph
    H: FGraph
    included: list[tuple[int, int]]  # (step, copy index) in inclusion order
    failed: bool
    deadly_step: int | None
    failing_steps: list[int]
    step_records: list[StepRecord]
    b1_flag: bool
    b2_flag: bool

    @property
    def copies(self) -> tuple[FCopy, ...]:
        return enumerate_copies(self.config.pattern, self.config.n)

    def h_partial(self, upto_step: int) -> FGraph:
        cps = self.copies
        chosen = tuple(cps[idx] for st, idx in self.included if st <= upto_step)
        return FGraph(self.config.pattern, self.config.n, chosen)


class CouplingState:
    """Revealed history: succeeded copies Y, failed copies N, revealed edges R."""

    def __init__(self, config: CouplingConfig, copies: Sequence[FCopy]):
        self.config = config
        self.copies = copies
        self.Y: list[int] = []
        self.N: list[int] = []
        self.R: set = set()
        self.H: list[int] = []
        self.step = 0

    def failed_full(self) -> list[frozenset]:
        return [self.copies[i].edges for i in self.N]

    def query(self, j: int) -> ConditionalQuery:
        R = frozenset(self.R)
        fs = tuple(self.copies[i].edges - R for i in self.N)
        return ConditionalQuery(self.copies[j].edges - R, HistoryConstraint(R, fs, self.config.thinning), self.config.p)

    def q_statistic(self, j: int) -> Fraction:
        return q_statistic(self.config.p, self.copies[j].edges, frozenset(self.R), self.failed_full())

    def pi_lower_bound(self, j: int) -> Fraction:
        return pi_lower_bound(self.config.p, self.copies[j].edges, frozenset(self.R), self.failed_full(),
                              self.config.thinning)

    def dangerous_set(self, j: int) -> list[int]:
        """Failed copies overlapping E_j outside R whose edges all lie in E_j union R."""
        ej = self.copies[j].edges
        tj = ej - self.R
        cover = ej | self.R
        out = []
        for i in self.N:
            e_i = self.copies[i].edges
            if (e_i - self.R) & tj and e_i <= cover:
                out.append(i)
        return out

    def is_dangerous(self, j: int) -> bool:
        need = 1 if self.config.thinning is None else 2
        return len(self.dangerous_set(j)) >= need

    def classify_step(self, j: int, landed_failing: bool) -> str:
        if not self.is_dangerous(j):
            return NORMAL
        return DEADLY if landed_failing else DANGEROUS


def classify_step(state: CouplingState, j: int, pi_j: Fraction, landed: bool = False) -> str:
    """normal / dangerous / deadly; deadly needs pi_j < pi and the inclusion coin to land."""
    return state.classify_step(j, landed and pi_j < state.config.pi)


def _test_order(config: CouplingConfig, rng: RandomStream) -> list[int]:
    order = list(range(len(enumerate_copies(config.pattern, config.n))))
    if config.copy_order == "shuffle":
        rng.shuffle(order)
    return order


def _run(config: CouplingConfig, rng: RandomStream, lazy: bool, record_steps: bool) -> CouplingResult:
    copies = enumerate_copies(config.pattern, config.n)
    order = _test_order(config, rng)
    edges = all_edges(config.n)
    G = None if lazy else sample_gnp(config.n, config.p, rng)
    engine = ConditionalEngine(config.p, config.thinning, {e: i for i, e in enumerate(edges)}, config.var_cap)
    state = CouplingState(config, copies)
    pi = config.pi
    records: list[StepRecord] = []
    included: list[tuple[int, int]] = []
    failing_steps: list[int] = []
    need = 1 if config.thinning is None else 2
    for step, j in enumerate(order):
        state.step = step
        query = state.query(j)
        pi_j = engine.probability(query)
        if record_steps:
            q_j = state.q_statistic(j)
            lower = state.pi_lower_bound(j)
            dcount = len(state.dangerous_set(j))
            missing = len(copies[j].edges - state.R)
        tested = False
        passed = None
        failing = False
        if pi_j >= pi:
            inclusion_probability = (pi / pi_j) * pi_j if pi_j else Fraction(0)
            if pi_j and rng.bernoulli(pi / pi_j):
                tested = True
                if lazy:
                    passed = rng.bernoulli(pi_j)
                else:
                    passed = copies[j].edges <= G.edges
                    if config.thinning is not None:
                        passed = rng.bernoulli(config.thinning) and passed
                if passed:
                    state.Y.append(j)
                    state.R |= copies[j].edges
                else:
                    state.N.append(j)
                    engine.record_failure(query, pi_j)
            include = bool(passed)
        else:
            inclusion_probability = pi
            include = rng.bernoulli(pi)
            failing = include
        if include:
            state.H.append(j)
            included.append((step, j))
        if failing:
            failing_steps.append(step)
        if record_steps:
            klass = NORMAL if dcount < need else (DEADLY if failing else DANGEROUS)
            records.append(StepRecord(
                step=step, copy_index=j, missing=missing, pi_j=pi_j, q_j=q_j, lower_bound=lower,
                dangerous_count=dcount, klass=klass, tested=tested, test_passed=passed, included=include,
                failing=failing, inclusion_probability=inclusion_probability,
            ))
    if lazy:
        present = engine.sample_completion(frozenset(state.R), [copies[i].edges - state.R for i in state.N],
                                           edges, rng)
        G = SimpleGraph(config.n, frozenset(present))
    H = FGraph(config.pattern, config.n, tuple(copies[j] for _, j in included))
    hyper = to_hypergraph(H)
    b1 = underlying_graph(H).max_degree() > config.delta
    b2 = find_avoidable_configuration(hyper) is not None if H.f_edges else False
    return CouplingResult(
        config=config, G=G, H=H, included=included, failed=bool(failing_steps),
        deadly_step=failing_steps[0] if failing_steps else None, failing_steps=failing_steps,
        step_records=records, b1_flag=b1, b2_flag=b2,
    )


def run_coupling(config: CouplingConfig, rng: RandomStream, record_steps: bool = True) -> CouplingResult:
    """Run the coupling with G(n,p) drawn up front and read only through copy tests."""
    return _run(config, rng, lazy=False, record_steps=record_steps)


def run_coupling_lazy_equivalence(config: CouplingConfig, rng: RandomStream,
                                  record_steps: bool = True) -> CouplingResult:
    """Same coupling, but test outcomes are drawn from pi_j and G is completed at the end."""
    return _run(config, rng, lazy=True, record_steps=record_steps)


def is_sound(result: CouplingResult) -> bool:
    """Every F-edge of H has its full edge set present in G."""
    return all(c.edges <= result.G.edges for c in result.H.f_edges)


@dataclass(frozen=True)
class Diagnosis:
    kind: str  # "B1", "B2" or "unexplained"
    step: int
    q_j: Fraction | None = None
    max_degree: int | None = None
    witness: object = field(default=None, compare=False)


def diagnose_failure(result: CouplingResult) -> Diagnosis:
    """Check the max-degree event, then the avoidable-configuration event, on H up to the deadly step."""
    if not result.failed:
        raise ValueError("diagnose_failure needs a failed coupling result")
    step = result.deadly_step
    H = result.h_partial(step)
    deg = underlying_graph(H).max_degree()
    if deg > result.config.delta:
        return Diagnosis("B1", step, max_degree=deg)
    witness = find_avoidable_configuration(to_hypergraph(H))
    if witness is not None:
        return Diagnosis("B2", step, max_degree=deg, witness=witness)
    q_j = None
    for rec in result.step_records:
        if rec.step == step:
            q_j = rec.q_j
            break
    return Diagnosis("unexplained", step, q_j=q_j, max_degree=deg)
