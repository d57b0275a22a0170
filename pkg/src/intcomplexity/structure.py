"""Finite truncations of the defect set and checks of its structure.

Nothing here assigns ordinal positions.  Each defect point instead carries
its limit degree ``Δ(n) = ‖n‖ - ‖n‖_st``, which is the certified finite
information behind an ordinal index.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cmp_to_key

import sympy

from intcomplexity.complexity import ComplexityTable, complexity
from intcomplexity.defect import ExactDefect, compare, numbers_with_defect_at_most
from intcomplexity.errors import ContractError, IndeterminateError
from intcomplexity.stability import (
    ASSUMED,
    CERTIFIED,
    DEFAULT_HORIZON,
    Kind,
    Policy,
    delta_gap,
    stability_scan,
)


@dataclass
class DefectEntry:
    value: ExactDefect
    representative: int
    complexity: int
    classes: set[int]
    count: int = 1
    limit_degree: int | None = None
    stable_certificate: str | None = None

    @property
    def u(self) -> int:
        return self.value.C % 3

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "n": self.representative,
            "C": self.complexity,
            "class": self.u,
            "count": self.count,
            "limit_degree": self.limit_degree,
            "stable_certificate": self.stable_certificate,
        }


@dataclass
class DefectCatalog:
    N: int
    s: ExactDefect
    entries: list[DefectEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def values(self) -> list[ExactDefect]:
        return [e.value for e in self.entries]

    def by_class(self, u: int) -> list[DefectEntry]:
        return [e for e in self.entries if e.u == u]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "s": self.s.to_json(),
            "entries": [e.to_json() for e in self.entries],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "C", "class", "approx_value", "limit_degree", "stable_certificate"])
        for e in self.entries:
            w.writerow(
                [
                    e.representative,
                    e.complexity,
                    e.u,
                    e.value.approx(),
                    "" if e.limit_degree is None else e.limit_degree,
                    e.stable_certificate or "",
                ]
            )
        return buf.getvalue()


def enumerate_defects(
    N: int,
    s: ExactDefect,
    table: ComplexityTable,
    classify: bool = False,
    horizon: int = DEFAULT_HORIZON,
    policy: Policy | str = Policy.ASSUME,
) -> DefectCatalog:
    """Distinct defect values of ``n <= N`` with ``δ(n) <= s``, in exact order.

    Numbers sharing a defect value (``n`` and ``3^k n`` when ``‖3^k n‖ =
    ‖n‖ + 3k``) collapse to one entry whose representative is the smallest,
    i.e. the leader.  With ``classify`` each entry also gets its limit degree.
    """
    table.require(N)
    groups: dict[ExactDefect, DefectEntry] = {}
    for n in numbers_with_defect_at_most(s, N, table):
        c = table[n]
        d = ExactDefect(c, n)
        entry = groups.get(d)
        if entry is None:
            groups[d] = DefectEntry(d, n, c, {c % 3})
        else:
            entry.count += 1
            entry.classes.add(c % 3)
    entries = sorted(groups.values(), key=cmp_to_key(lambda x, y: compare(x.value, y.value)))
    if classify:
        for e in entries:
            e.limit_degree, e.stable_certificate = classify_limit_degree(
                e.representative, table, policy, horizon
            )
    return DefectCatalog(N, s, entries)


def classify_limit_degree(
    n: int,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
    horizon: int = DEFAULT_HORIZON,
) -> tuple[int, str]:
    """Limit degree of ``δ(n)`` in the closure: ``Δ(n)``.  0 means isolated."""
    return delta_gap(n, horizon, table, policy)


def closure_membership(C: int, n: int, table: ComplexityTable) -> bool:
    """Whether ``C - 3 log_3 n`` lies in the closure of the defect set."""
    table.require(n)
    return C >= table[n]


@dataclass
class DisjointnessReport:
    passed: bool
    mixed_classes: list[int] = field(default_factory=list)
    order_violations: list[int] = field(default_factory=list)
    congruence_violations: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "mixed_classes": self.mixed_classes,
            "order_violations": self.order_violations,
            "congruence_violations": self.congruence_violations,
        }


def check_class_disjointness(catalog: DefectCatalog) -> DisjointnessReport:
    """No value in two classes; entries strictly increasing; each entry's
    members agree mod 3 with its canonical C."""
    mixed, order, congr = [], [], []
    for i, e in enumerate(catalog.entries):
        if len(e.classes) != 1:
            mixed.append(i)
        elif next(iter(e.classes)) != e.u:
            congr.append(i)
        if i and compare(catalog.entries[i - 1].value, e.value) >= 0:
            order.append(i)
    return DisjointnessReport(not (mixed or order or congr), mixed, order, congr)


# ---------------------------------------------------------------------------
# degree-1 families b(a 3^k + 1) 3^l


@dataclass(frozen=True)
class FamilyWitness:
    a: int
    b: int
    k: int
    l: int  # noqa: E741

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "k": self.k, "l": self.l}


def family_search(a: int, b: int, m: int) -> list[FamilyWitness]:
    """Every ``(k, l)`` with ``b(a 3^k + 1) 3^l = m``; loops end by growth."""
    if a < 1 or b < 1 or m < 1:
        raise ContractError("a, b and m must be positive")
    out = []
    k = 0
    while b * (a * 3**k + 1) <= m:
        base = b * (a * 3**k + 1)
        l, v = 0, base  # noqa: E741
        while v <= m:
            if v == m:
                out.append(FamilyWitness(a, b, k, l))
            v *= 3
            l += 1  # noqa: E741
        k += 1
    return out


def counterexample_check(q: int, m: int, table: ComplexityTable | None = None) -> list[FamilyWitness]:
    """All ways to write ``m = b(a 3^k + 1) 3^l`` with ``ab = q``.

    An empty list means m is not of that form for any factorization of q
    (b = 1 included).
    """
    if q < 1 or m < 1:
        raise ContractError("q and m must be positive")
    if table is not None:
        table.require(m)
    out = []
    for b in sympy.divisors(q):
        out.extend(family_search(q // b, b, m))
    return out


@dataclass
class SeriesTerm:
    k: int
    m: int
    complexity: int
    certificate: str
    defect: ExactDefect
    below_target: bool
    exceptional: bool
    increasing: bool | None

    @property
    def u(self) -> int:
        return self.complexity % 3

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": str(self.m),
            "complexity": self.complexity,
            "certificate": self.certificate,
            "defect": self.defect.to_json(),
            "class": self.u,
            "below_target": self.below_target,
            "exceptional": self.exceptional,
            "increasing": self.increasing,
        }


@dataclass
class ConvergenceReport:
    a: int
    b: int
    mode: str
    target: ExactDefect
    target_certificate: str
    expected_class: int
    terms: list[SeriesTerm]

    @property
    def strictly_increasing(self) -> bool:
        return all(t.increasing is not False for t in self.terms)

    @property
    def bounded_by_target(self) -> bool:
        return all(t.below_target for t in self.terms)

    @property
    def classes_consistent(self) -> bool:
        return all(t.u == self.expected_class for t in self.terms if not t.exceptional)

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "mode": self.mode,
            "target": self.target.to_json(),
            "target_certificate": self.target_certificate,
            "expected_class": self.expected_class,
            "strictly_increasing": self.strictly_increasing,
            "bounded_by_target": self.bounded_by_target,
            "classes_consistent": self.classes_consistent,
            "terms": [t.to_json() for t in self.terms],
        }


def _cpx(m, mode, horizon, table, policy) -> tuple[int, str]:
    if mode == "plain":
        return complexity(m, table), CERTIFIED
    v = stability_scan(m, horizon, table)
    if not v.certified and Policy(policy) is Policy.STRICT:
        raise IndeterminateError(f"‖{m}‖_st not certified within horizon {horizon}", [m])
    return v.stable_complexity, v.certificate


def convergence_series(
    a: int,
    b: int,
    k_max: int,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
    mode: str = "plain",
    horizon: int = DEFAULT_HORIZON,
) -> ConvergenceReport:
    """Defects of ``b(a 3^k + 1)`` for ``k = 0..k_max`` against the limit
    ``δ_st(ab) + 1``.

    A term is exceptional when its complexity is below ``‖ab‖_st + 3k + 1``.
    ``mode="stable"`` uses stable complexities of the terms.
    """
    if a < 1 or b < 1 or k_max < 0:
        raise ContractError("need a, b >= 1 and k_max >= 0")
    if mode not in ("plain", "stable"):
        raise ContractError(f"unknown mode {mode!r}")
    v = stability_scan(a * b, horizon, table)
    if not v.certified and Policy(policy) is Policy.STRICT:
        raise IndeterminateError(f"‖{a * b}‖_st not certified within horizon {horizon}", [a * b])
    base = v.stable_complexity + 1
    target = ExactDefect(base, a * b)
    terms: list[SeriesTerm] = []
    for k in range(k_max + 1):
        m = b * (a * 3**k + 1)
        c, cert = _cpx(m, mode, horizon, table, policy)
        d = ExactDefect(c, m)
        prev = terms[-1].defect if terms else None
        terms.append(
            SeriesTerm(
                k,
                m,
                c,
                cert,
                d,
                compare(d, target) < 0,
                c < base + 3 * k,
                None if prev is None else compare(prev, d) < 0,
            )
        )
    return ConvergenceReport(a, b, mode, target, v.certificate, base % 3, terms)


@dataclass
class FamilyScanReport:
    """Outcome of checking ``‖b(a 3^k + 1) 3^l‖`` against a predicted value."""

    a: int
    b: int
    hypotheses: dict
    hypotheses_hold: bool | None
    certificate: str
    k_max: int
    l_max: int
    violations: list[tuple[int, int]] = field(default_factory=list)
    scanned: bool = False

    @property
    def K_observed(self) -> int | None:
        if not self.scanned:
            return None
        return max((k for k, _ in self.violations), default=-1) + 1

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "hypotheses": self.hypotheses,
            "hypotheses_hold": self.hypotheses_hold,
            "certificate": self.certificate,
            "k_max": self.k_max,
            "l_max": self.l_max,
            "scanned": self.scanned,
            "K_observed": self.K_observed,
            "violations": [{"k": k, "l": l} for k, l in self.violations],
        }


def _stable_flag(n, horizon, table, policy) -> tuple[bool | None, str]:
    v = stability_scan(n, horizon, table)
    if v.kind is Kind.UNKNOWN:
        if Policy(policy) is Policy.STRICT:
            raise IndeterminateError(f"stability of {n} unresolved within horizon {horizon}", [n])
        return True, ASSUMED
    return v.kind is Kind.STABLE, CERTIFIED


def _family_scan(a, b, k_max, l_max, predicted, hyp, table) -> FamilyScanReport:
    holds = all(v for v, _ in hyp.values())
    cert = CERTIFIED if all(c == CERTIFIED for _, c in hyp.values()) else ASSUMED
    report = FamilyScanReport(
        a, b, {name: {"value": v, "certificate": c} for name, (v, c) in hyp.items()},
        holds, cert, k_max, l_max,
    )
    if not holds:
        return report
    report.scanned = True
    for k in range(k_max + 1):
        m = b * (a * 3**k + 1)
        for l in range(l_max + 1):  # noqa: E741
            if complexity(m * 3**l, table) != predicted + 3 * k + 3 * l:
                report.violations.append((k, l))
    return report


def dragons_check(
    a: int,
    b: int,
    k_max: int,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
    horizon: int = DEFAULT_HORIZON,
    l_max: int = 0,
) -> FamilyScanReport:
    """Off-by-one family: with ab and a stable, ``‖a‖ + ‖b‖ = ‖ab‖ + 1`` and
    b > 1, ``‖b(a 3^k + 1)‖ = ‖a‖ + ‖b‖ + 3k + 1`` for all large k.

    ``l_max > 0`` also checks the ``3^l`` multiples, which additionally
    requires b stable.  If a hypothesis is false nothing is scanned.
    """
    if b <= 1:
        raise ContractError("b must exceed 1")
    if a < 1 or k_max < 0 or l_max < 0:
        raise ContractError("need a >= 1, k_max >= 0 and l_max >= 0")
    ca, cb, cab = complexity(a, table), complexity(b, table), complexity(a * b, table)
    hyp = {
        "ab_stable": _stable_flag(a * b, horizon, table, policy),
        "a_stable": _stable_flag(a, horizon, table, policy),
        "off_by_one": (ca + cb == cab + 1, CERTIFIED),
    }
    if l_max > 0:
        hyp["b_stable"] = _stable_flag(b, horizon, table, policy)
    return _family_scan(a, b, k_max, l_max, ca + cb + 1, hyp, table)


def cj2_check(
    a: int,
    b: int,
    k_max: int,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
    horizon: int = DEFAULT_HORIZON,
    l_max: int = 0,
) -> FamilyScanReport:
    """Additive family: with ab stable and ``‖ab‖ = ‖a‖ + ‖b‖``,
    ``‖b(a 3^k + 1) 3^l‖ = ‖a‖ + ‖b‖ + 3k + 3l + 1`` for all large k.

    With ``b = 1`` this is the single-factor case, needing only a stable.
    """
    if a < 1 or b < 1 or k_max < 0 or l_max < 0:
        raise ContractError("need a, b >= 1 and k_max, l_max >= 0")
    ca, cb, cab = complexity(a, table), complexity(b, table), complexity(a * b, table)
    hyp = {
        "ab_stable": _stable_flag(a * b, horizon, table, policy),
        "additive": (b == 1 or cab == ca + cb, CERTIFIED),
    }
    predicted = ca + (cb if b > 1 else 0) + 1
    return _family_scan(a, b, k_max, l_max, predicted, hyp, table)


def find_dragon_instances(
    q_max: int,
    table: ComplexityTable,
    horizon: int = DEFAULT_HORIZON,
    limit: int | None = None,
) -> list[tuple[int, int]]:
    """Pairs ``(a, b)`` with ``ab <= q_max`` whose off-by-one hypotheses are
    all certified (not assumed)."""
    table.require(q_max)
    found = []
    for q in range(2, q_max + 1):
        vq = stability_scan(q, horizon, table)
        if not (vq.kind is Kind.STABLE and vq.certified):
            continue
        for b in sympy.divisors(q)[1:]:
            a = q // b
            if table[a] + table[b] != table[q] + 1:
                continue
            va = stability_scan(a, horizon, table)
            if va.kind is Kind.STABLE and va.certified:
                found.append((a, b))
                if limit is not None and len(found) >= limit:
                    return found
    return found
