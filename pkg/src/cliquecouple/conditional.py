"""Exact conditional probabilities of copy events given a test history.

The history fixes a set R of edges known to be present and a list of
"failed" edge sets E_i' (edges of a failed copy outside R), each of which is
known not to be fully present.  In thinned mode each failed copy also owns a
private coin of bias c, and the constraint reads "not (all of E_i' present
and coin up)".

Results are exact :class:`fractions.Fraction` values; the recursion itself
runs on scaled integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, ComponentTooLarge, ContractViolation, ZeroProbabilityCondition
from .graphs import Edge

SHANNON_VAR_CAP = 40
BRUTE_FORCE_CAP = 24


@dataclass(frozen=True)
class HistoryConstraint:
    revealed_present: frozenset[Edge]
    failed_sets: tuple[frozenset[Edge], ...]
    thinning: Fraction | None = None

    def __post_init__(self):
        for s in self.failed_sets:
            if s & self.revealed_present:
                raise ContractViolation("failed sets must be disjoint from the revealed edges")
        if self.thinning is not None and not 0 <= self.thinning <= 1:
            raise ContractViolation("thinning probability must lie in [0,1]")


@dataclass(frozen=True)
class ConditionalQuery:
    target_set: frozenset[Edge]
    constraint: HistoryConstraint
    edge_probability: Fraction

    def __post_init__(self):
        if self.target_set & self.constraint.revealed_present:
            raise ContractViolation("target set must be disjoint from the revealed edges")

    @classmethod
    def from_history(
        cls,
        target: Iterable[Edge],
        succeeded: Sequence[Iterable[Edge]],
        failed: Sequence[Iterable[Edge]],
        p: Fraction,
        thinning: Fraction | None = None,
    ) -> "ConditionalQuery":
        """Build a query from the full edge sets of the succeeded and failed copies."""
        R = frozenset().union(*(frozenset(e) for e in succeeded)) if succeeded else frozenset()
        fs = tuple(frozenset(e) - R for e in failed)
        return cls(frozenset(target) - R, HistoryConstraint(R, fs, thinning), Fraction(p))


def target_component(target: frozenset[Edge], failed: Sequence[frozenset[Edge]]) -> list[int]:
    """Indices of failed sets linked to the target through chains of shared edges."""
    reach = set(target)
    members: list[int] = []
    pending = [i for i, s in enumerate(failed) if s]
    grew = True
    while grew:
        grew = False
        rest = []
        for i in pending:
            if failed[i] & reach:
                members.append(i)
                reach |= failed[i]
                grew = True
            else:
                rest.append(i)
        pending = rest
    return sorted(members)


COIN_BITS = 16
COIN_FIELD = (1 << COIN_BITS) - 1


class ConditionalEngine:
    """Shannon expansion with memoisation over residual clause sets.

    A clause is encoded as ``mask << COIN_BITS | k``: ``mask`` selects edge
    variables by index and ``k`` counts the private coins attached to it
    (k = 0 for a plain clause).  A clause with k coins contributes a factor
    (1-c)^k when all of its edges are present, and 0 if it is plain.

    With p = a/b and c = u/w, the value stored for a clause set C is the
    integer Z(C) * b^|vars(C)| * w^(coins in C), so the recursion never
    touches rationals.  An engine is bound to one (p, c) pair and its memo
    may be reused across queries that share the same edge indexing.
    """

    def __init__(self, p: Fraction, thinning: Fraction | None = None,
                 edge_index: dict[Edge, int] | None = None, var_cap: int = SHANNON_VAR_CAP):
        self.p = Fraction(p)
        self.c = None if thinning is None else Fraction(thinning)
        self.a, self.b = self.p.numerator, self.p.denominator
        self.ba = self.b - self.a
        if self.c is None:
            self.u, self.w = 0, 1
        else:
            self.u, self.w = self.c.numerator, self.c.denominator
        self.wu = self.w - self.u
        self.var_cap = var_cap
        self.edge_index = edge_index if edge_index is not None else {}
        self.memo: dict[frozenset[int], int] = {}
        self._ap = [1]
        self._bp = [1]
        self._wp = [1]
        self._wup = [1]
        self.nodes = 0
        self._last: tuple[ConditionalQuery, frozenset[int], Fraction] | None = None

    @staticmethod
    def _pow(table: list[int], base: int, k: int) -> int:
        while len(table) <= k:
            table.append(table[-1] * base)
        return table[k]

    def _mask(self, edges: Iterable[Edge]) -> int:
        m = 0
        for e in edges:
            idx = self.edge_index.get(e)
            if idx is None:
                idx = self.edge_index[e] = len(self.edge_index)
            m |= 1 << idx
        return m

    @staticmethod
    def _shape(clauses: Iterable[int]) -> tuple[int, int]:
        union = 0
        coins = 0
        for cl in clauses:
            union |= cl >> COIN_BITS
            coins += cl & COIN_FIELD
        return union.bit_count(), coins

    def _clauses(self, sets: Iterable[frozenset[Edge]]) -> frozenset[int]:
        k = 0 if self.c is None else 1
        return _simplify((self._mask(s) << COIN_BITS) | k for s in sets)

    def z_fraction(self, clauses: frozenset[int]) -> Fraction:
        """Probability that no clause is violated."""
        nv, kc = self._shape(clauses)
        return Fraction(self.z(clauses), self._pow(self._bp, self.b, nv) * self._pow(self._wp, self.w, kc))

    def _fix_one(self, clauses: Iterable[int], bit: int) -> tuple[frozenset[int] | None, int]:
        """Set the variable ``bit`` to 1.

        Returns the residual clause set (None if a plain clause is violated)
        and the number of coins on clauses that became fully present.
        """
        emptied = 0
        merged: dict[int, int] = {}
        shrunk = []
        for cl in clauses:
            m = cl >> COIN_BITS
            k = cl & COIN_FIELD
            if m & bit:
                m ^= bit
                if not m:
                    if not k:
                        return None, 0
                    emptied += k
                    continue
                if not k:
                    shrunk.append(m)
            old = merged.get(m)
            if old is None:
                merged[m] = k
            elif old and k:
                merged[m] = old + k
            else:
                merged[m] = 0
        if shrunk:
            return frozenset((m << COIN_BITS) | k for m, k in merged.items()
                             if not any(a != m and a & m == a for a in shrunk)), emptied
        return frozenset((m << COIN_BITS) | k for m, k in merged.items()), emptied

    # -- public API --------------------------------------------------------

    def probability(self, q: ConditionalQuery) -> Fraction:
        thinned = q.constraint.thinning is not None
        if thinned != (self.c is not None) or (thinned and q.constraint.thinning != self.c):
            raise ContractViolation("query thinning does not match the engine")
        if Fraction(q.edge_probability) != self.p:
            raise ContractViolation("query edge probability does not match the engine")
        failed = q.constraint.failed_sets
        if not thinned and any(not s for s in failed):
            raise ZeroProbabilityCondition("a failed copy has all its edges revealed")
        comp = target_component(q.target_set, failed)
        scope = set(q.target_set).union(*(failed[i] for i in comp)) if comp else set(q.target_set)
        if len(scope) > self.var_cap:
            raise ComponentTooLarge(f"component has {len(scope)} edge variables (cap {self.var_cap})")
        clauses = self._clauses(failed[i] for i in comp)
        den = self.z_fraction(clauses)
        if den == 0:
            raise ZeroProbabilityCondition("conditioning event has probability zero")
        self._last = (q, clauses, den)
        factor = self.p ** len(q.target_set)
        if thinned:
            factor *= self.c
        residual = clauses
        emptied = 0
        for bit in _bits(self._mask(q.target_set)):
            residual, k = self._fix_one(residual, bit)
            if residual is None:
                return Fraction(0)
            emptied += k
        if emptied:
            factor *= (1 - self.c) ** emptied
        if factor == 0:
            return Fraction(0)
        return factor * self.z_fraction(residual) / den

    def record_failure(self, q: ConditionalQuery, pi_j: Fraction) -> None:
        """Seed the memo after the copy queried by ``q`` failed its test.

        Adding the failed clause multiplies the probability of the history by
        exactly 1 - pi_j, so the next denominator needs no expansion.  Only
        valid when ``pi_j`` is the value just returned for ``q``.
        """
        if self._last is None or self._last[0] is not q:
            return
        _, clauses, den = self._last
        k = 0 if self.c is None else 1
        # a list, not a set union: an equal coin clause must merge, not vanish
        grown = _simplify([*clauses, (self._mask(q.target_set) << COIN_BITS) | k])
        value = den * (1 - pi_j)
        nv, kc = self._shape(grown)
        scaled = value * self._pow(self._bp, self.b, nv) * self._pow(self._wp, self.w, kc)
        if scaled.denominator != 1:
            raise ContractViolation("recorded failure does not match the last query")
        self.memo[grown] = scaled.numerator

    def z(self, clauses: frozenset[int]) -> int:
        """Scaled count for ``clauses``; see the class docstring."""
        if not clauses:
            return 1
        hit = self.memo.get(clauses)
        if hit is not None:
            return hit
        self.nodes += 1
        comps = _components(clauses)
        if len(comps) > 1:
            out = 1
            for comp in comps:
                out *= self.z(comp)
                if not out:
                    break
            self.memo[clauses] = out
            return out
        if len(clauses) == 1:
            (cl,) = clauses
            m = (cl >> COIN_BITS).bit_count()
            k = cl & COIN_FIELD
            if k:
                wk = self._pow(self._wp, self.w, k)
                out = self._pow(self._bp, self.b, m) * wk \
                    - self._pow(self._ap, self.a, m) * (wk - self._pow(self._wup, self.wu, k))
            else:
                out = self._pow(self._bp, self.b, m) - self._pow(self._ap, self.a, m)
            self.memo[clauses] = out
            return out
        union = 0
        kc = 0
        counts: dict[int, int] = {}
        for cl in clauses:
            m = cl >> COIN_BITS
            union |= m
            kc += cl & COIN_FIELD
            while m:
                low = m & -m
                counts[low] = counts.get(low, 0) + 1
                m ^= low
        nv = union.bit_count()
        bit = max(counts, key=counts.__getitem__)
        out = 0
        if self.a:
            c1, emptied = self._fix_one(clauses, bit)
            if c1 is not None:
                nv1, kc1 = self._shape(c1)
                out += self.a * self._pow(self._wup, self.wu, emptied) * self.z(c1) \
                    * self._pow(self._bp, self.b, nv - 1 - nv1) * self._pow(self._wp, self.w, kc - emptied - kc1)
        if self.ba:
            c0 = frozenset(cl for cl in clauses if not (cl >> COIN_BITS) & bit)
            nv0, kc0 = self._shape(c0)
            out += self.ba * self.z(c0) * self._pow(self._bp, self.b, nv - 1 - nv0) \
                * self._pow(self._wp, self.w, kc - kc0)
        self.memo[clauses] = out
        return out

    def sample_completion(self, revealed: frozenset[Edge], failed: Sequence[frozenset[Edge]],
                          edges: Sequence[Edge], rng) -> set[Edge]:
        """Draw the unrevealed edges from their exact law given the history."""
        present = set(revealed)
        clauses = self._clauses(s for s in failed if s)
        for e in edges:
            if e in revealed:
                continue
            bit = self._mask([e])
            if not any((cl >> COIN_BITS) & bit for cl in clauses):
                if rng.bernoulli(self.p):
                    present.add(e)
                continue
            one_clauses, emptied = self._fix_one(clauses, bit)
            if one_clauses is None:
                prob_one = Fraction(0)
            else:
                prob_one = self.p * self.z_fraction(one_clauses) / self.z_fraction(clauses)
                if emptied:
                    prob_one *= (1 - self.c) ** emptied
            if rng.bernoulli(prob_one):
                present.add(e)
                clauses = one_clauses
            else:
                clauses = frozenset(cl for cl in clauses if not (cl >> COIN_BITS) & bit)
        return present


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def _simplify(clauses: Iterable[int]) -> frozenset[int]:
    """Merge clauses on equal masks and drop those implied by a plain clause."""
    merged: dict[int, int] = {}
    for cl in clauses:
        m = cl >> COIN_BITS
        k = cl & COIN_FIELD
        old = merged.get(m)
        if old is None:
            merged[m] = k
        elif old and k:
            merged[m] = old + k
        else:
            merged[m] = 0
    plain = [m for m, k in merged.items() if not k]
    return frozenset((m << COIN_BITS) | k for m, k in merged.items()
                     if not any(a != m and a & m == a for a in plain))


def _components(clauses: frozenset[int]) -> list[frozenset[int]]:
    rest = list(clauses)
    comps = []
    while rest:
        first = rest.pop()
        mask = first >> COIN_BITS
        members = [first]
        grew = True
        while grew and rest:
            grew = False
            keep = []
            for cl in rest:
                if (cl >> COIN_BITS) & mask:
                    mask |= cl >> COIN_BITS
                    members.append(cl)
                    grew = True
                else:
                    keep.append(cl)
            rest = keep
        if not comps and not rest:
            return [clauses]
        comps.append(frozenset(members))
    return comps


def conditional_probability(q: ConditionalQuery, var_cap: int = SHANNON_VAR_CAP) -> Fraction:
    """P(all target edges present [and target coin up] | no failed set fully present)."""
    return ConditionalEngine(q.edge_probability, q.constraint.thinning, var_cap=var_cap).probability(q)


def brute_force_conditional(q: ConditionalQuery, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Direct weighted enumeration over every assignment of the edges in scope.

    Every constraint is kept, linked to the target or not.  Coins are
    summed out in closed form per assignment: a fully present failed set
    contributes a factor (1-c) in thinned mode and 0 in plain mode.
    """
    p = Fraction(q.edge_probability)
    c = q.constraint.thinning
    failed = q.constraint.failed_sets
    if c is None and any(not s for s in failed):
        raise ZeroProbabilityCondition("a failed copy has all its edges revealed")
    scope = sorted(set(q.target_set).union(*failed))
    k = len(scope)
    if k > cap:
        raise CapExceeded(f"{k} edges in scope exceeds the brute-force cap {cap}")
    idx = {e: i for i, e in enumerate(scope)}

    def mask(es):
        return sum(1 << idx[e] for e in es)

    tmask = np.uint64(mask(q.target_set))
    masks = [np.uint64(mask(s)) for s in failed if s]
    coin_empty = sum(1 for s in failed if not s)  # thinned: a revealed failed copy only constrains its coin
    nv = len(masks) + 1
    den_counts = np.zeros((k + 1) * nv, dtype=np.int64)
    num_counts = np.zeros((k + 1) * nv, dtype=np.int64)
    chunk = 1 << 20
    total = 1 << k
    for start in range(0, total, chunk):
        a = np.arange(start, min(total, start + chunk), dtype=np.uint64)
        ok = np.ones(a.shape, dtype=bool)
        viol = np.zeros(a.shape, dtype=np.int64)
        for m in masks:
            full = (a & m) == m
            if c is None:
                ok &= ~full
            else:
                viol += full
        pc = np.bitwise_count(a).astype(np.int64)
        key = pc * nv + viol
        tfull = (a & tmask) == tmask
        den_counts += np.bincount(key[ok], minlength=len(den_counts))
        num_counts += np.bincount(key[ok & tfull], minlength=len(num_counts))
    one_minus_c = Fraction(1) if c is None else 1 - c
    den = num = Fraction(0)
    for key in np.nonzero(den_counts)[0]:
        pcount, v = divmod(int(key), nv)
        w = p ** pcount * (1 - p) ** (k - pcount) * one_minus_c ** v
        den += int(den_counts[key]) * w
        num += int(num_counts[key]) * w
    if c is not None:
        den *= one_minus_c ** coin_empty
        num *= one_minus_c ** coin_empty * c
    if den == 0:
        raise ZeroProbabilityCondition("conditioning event has probability zero")
    return num / den


def q_statistic(p: Fraction, target: frozenset[Edge], revealed: frozenset[Edge],
                failed: Sequence[frozenset[Edge]]) -> Fraction:
    """Sum over failed copies overlapping the target outside R of p^|E_i minus (E_j union R)|.

    ``target`` and ``failed`` are full copy edge sets.
    """
    tj = target - revealed
    cover = target | revealed
    total = Fraction(0)
    p = Fraction(p)
    for e_i in failed:
        if (e_i - revealed) & tj:
            total += p ** len(e_i - cover)
    return total


def pi_lower_bound(p: Fraction, target: frozenset[Edge], revealed: frozenset[Edge],
                   failed: Sequence[frozenset[Edge]], thinning: Fraction | None = None) -> Fraction:
    """p^|E_j minus R| (1 - Q), or c p^|E_j minus R| (1 - c Q) when thinned. Not clamped."""
    p = Fraction(p)
    Q = q_statistic(p, target, revealed, failed)
    base = p ** len(target - revealed)
    if thinning is None:
        return base * (1 - Q)
    return thinning * base * (1 - thinning * Q)


def dump_query(q: ConditionalQuery) -> str:
    """Line-oriented description of a query, with the target's component marked."""

    def fmt(es):
        return " ".join(f"{u}-{v}" for u, v in sorted(es)) or "-"

    comp = set(target_component(q.target_set, q.constraint.failed_sets))
    lines = [
        f"p {q.edge_probability}",
        f"thinning {q.constraint.thinning if q.constraint.thinning is not None else 'none'}",
        f"revealed {fmt(q.constraint.revealed_present)}",
        f"target {fmt(q.target_set)}",
    ]
    for i, s in enumerate(q.constraint.failed_sets):
        tag = "linked" if i in comp else "dropped"
        lines.append(f"failed {i} {tag} {fmt(s)}")
    return "\n".join(lines) + "\n"


def all_edges(n: int) -> list[Edge]:
    return list(combinations(range(n), 2))
