"""3-representations by low-defect polynomials, exceptional sets, leaders
and good-covering verification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from intcomplexity.complexity import ComplexityTable, complexity
from intcomplexity.defect import ExactDefect, compare, defect_of, numbers_with_defect_at_most
from intcomplexity.errors import ContractError, IndeterminateError
from intcomplexity.ldpoly import LowDefectPair, LowDefectPoly, delta_pair, evaluate
from intcomplexity.stability import ASSUMED, CERTIFIED, DEFAULT_HORIZON, Policy, stability_scan


@dataclass(frozen=True)
class RepresentationWitness:
    exponents: tuple[int, ...]
    target: int
    augmented_exponent: int | None = None
    efficient: bool | None = None

    @property
    def total(self) -> int:
        return sum(self.exponents) + (self.augmented_exponent or 0)

    def to_json(self) -> dict:
        return {
            "exponents": list(self.exponents),
            "augmented_exponent": self.augmented_exponent,
            "target": str(self.target),
            "efficient": self.efficient,
        }


def _solve(f: LowDefectPoly, M: int) -> list[tuple[int, ...]]:
    """Exponent tuples n with f(3^n) = M, for non-augmented f."""
    d = f.nvars
    if d == 0:
        return [()] if f.constant_term == M else []
    a = f.leading_coefficient
    # a * 3^(Σn) <= f(3^n) <= M bounds the total exponent
    total = 0
    while a * 3 ** (total + 1) <= M:
        total += 1
    if a > M:
        return []
    found = []
    prefix: list[int] = []

    def rec(i: int, budget: int):
        if i == d:
            if evaluate(f, prefix) == M:
                found.append(tuple(prefix))
            return
        for e in range(budget + 1):
            # f grows in every variable; remaining variables at exponent 0 give the minimum
            if evaluate(f, prefix + [e] + [0] * (d - i - 1)) > M:
                break
            prefix.append(e)
            rec(i + 1, budget - e)
            prefix.pop()

    rec(0, total)
    found.sort(key=lambda t: (sum(t), t))
    return found


def find_representations(f: LowDefectPoly, N: int, augmented: bool = False) -> list[RepresentationWitness]:
    """Every exponent tuple 3-representing N by f (or by f̂ when ``augmented``)."""
    if N < 1:
        raise ContractError("N must be positive")
    if f.augmented:
        raise ContractError("pass the plain polynomial and augmented=True")
    if not augmented:
        return [RepresentationWitness(t, N) for t in _solve(f, N)]
    out = []
    M, ell = N, 0
    while True:
        out.extend(RepresentationWitness(t, N, ell) for t in _solve(f, M))
        if M % 3:
            break
        M //= 3
        ell += 1
    out.sort(key=lambda w: (w.total, w.exponents, w.augmented_exponent))
    return out


def is_efficiently_represented(
    p: LowDefectPair, N: int, table: ComplexityTable | None = None, augmented: bool = False
) -> tuple[bool, RepresentationWitness | None]:
    """Whether some witness has ``‖N‖ = C + 3 * (sum of exponents)``."""
    target = complexity(N, table)
    for w in find_representations(p.poly, N, augmented):
        if target == p.C + 3 * w.total:
            return True, RepresentationWitness(w.exponents, N, w.augmented_exponent, True)
    return False, None


@dataclass
class ExceptionalSet:
    tuples: set[tuple[int, ...]]
    mode: str
    certificate: str
    unresolved: list[tuple[int, ...]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "certificate": self.certificate,
            "exceptional": [list(t) for t in sorted(self.tuples)],
            "unresolved": [list(t) for t in self.unresolved],
        }


def exceptional_set(
    p: LowDefectPair,
    box,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
    mode: str = "plain",
    horizon: int = DEFAULT_HORIZON,
) -> ExceptionalSet:
    """Tuples n in the box (inclusive per-variable maxima) where the value
    ``f(3^n)`` has complexity below ``C + 3 Σ n``.

    ``mode="stable"`` uses stable complexity, as the definition requires;
    ``mode="plain"`` uses ``‖·‖`` and never needs a stability verdict.
    """
    box = tuple(box)
    if len(box) != p.degree:
        raise ContractError(f"box has {len(box)} bounds for degree {p.degree}")
    if mode not in ("plain", "stable"):
        raise ContractError(f"unknown mode {mode!r}")
    out: set[tuple[int, ...]] = set()
    unresolved = []
    for n in itertools.product(*(range(b + 1) for b in box)):
        value = evaluate(p.poly, n)
        bound = p.C + 3 * sum(n)
        if complexity(value, table) < bound:
            out.add(n)
            continue
        if mode == "plain":
            continue
        v = stability_scan(value, horizon, table)
        if v.stable_complexity < bound:
            out.add(n)
        elif not v.certified:
            unresolved.append(n)
    if unresolved and Policy(policy) is Policy.STRICT:
        raise IndeterminateError(
            f"{len(unresolved)} tuples need uncertified stability verdicts", unresolved
        )
    return ExceptionalSet(out, mode, ASSUMED if unresolved else CERTIFIED, unresolved)


@dataclass
class MinimalK:
    K_observed: int
    k_max: int
    exceptions: list[int]
    certificate: str

    def to_json(self) -> dict:
        return {
            "K_observed": self.K_observed,
            "k_max": self.k_max,
            "exceptions": self.exceptions,
            "certificate": self.certificate,
        }


def minimal_K_degree1(
    p: LowDefectPair,
    k_max: int,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
    mode: str = "plain",
    horizon: int = DEFAULT_HORIZON,
) -> MinimalK:
    """Least K <= k_max + 1 with no exceptional k in ``[K, k_max]``."""
    if p.degree != 1:
        raise ContractError("minimal_K_degree1 needs a degree-1 pair")
    ex = exceptional_set(p, (k_max,), table, policy, mode, horizon)
    ks = sorted(t[0] for t in ex.tuples)
    return MinimalK(ks[-1] + 1 if ks else 0, k_max, ks, ex.certificate)


# ---------------------------------------------------------------------------
# leaders


def is_leader(n: int, table: ComplexityTable) -> bool:
    table.require(n)
    return n % 3 != 0 or table[n] < 3 + table[n // 3]


def leaders(N: int, table: ComplexityTable) -> list[int]:
    """All leaders up to N: the least number with each defect value."""
    table.require(N)
    v = table.values[: N + 1].astype(np.int16)
    n = np.arange(N + 1)
    mask = n % 3 != 0
    thirds = n[3::3]
    mask[3::3] = v[thirds] < 3 + v[thirds // 3]
    mask[0] = False
    return [int(x) for x in np.nonzero(mask)[0]]


def leader_decompose(n: int, table: ComplexityTable) -> tuple[int, int]:
    """``(m, k)`` with ``n = 3^k m``, m a leader and ``δ(m) = δ(n)``."""
    table.require(n)
    k = 0
    while n % 3 == 0 and table[n] == table[n // 3] + 3:
        n //= 3
        k += 1
    return n, k


# ---------------------------------------------------------------------------
# good coverings


@dataclass
class CoveringReport:
    s: ExactDefect
    N: int
    condition2_violations: list[tuple[int, str, ExactDefect]]
    uncovered_leaders: list[int]
    checked_leaders: int

    @property
    def passed(self) -> bool:
        return not self.condition2_violations and not self.uncovered_leaders

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "s": self.s.to_json(),
            "N": self.N,
            "checked_leaders": self.checked_leaders,
            "condition2_violations": [
                {"index": i, "pair": text, "delta": d.to_json()}
                for i, text, d in self.condition2_violations
            ],
            "uncovered_leaders": self.uncovered_leaders,
        }


def verify_covering(
    candidates, s: ExactDefect, N: int, table: ComplexityTable
) -> CoveringReport:
    """Check a candidate good covering of the leaders with defect <= s, up to N.

    Condition (2): every candidate has ``δ(f, C) <= s``.  Condition (1),
    truncated: every leader ``n <= N`` with ``δ(n) <= s`` is efficiently
    3-represented by some candidate.
    """
    candidates = list(candidates)
    bad2 = [
        (i, str(p), delta_pair(p))
        for i, p in enumerate(candidates)
        if compare(delta_pair(p), s) > 0
    ]
    uncovered = []
    checked = 0
    for n in numbers_with_defect_at_most(s, N, table):
        if not is_leader(n, table):
            continue
        checked += 1
        if not any(is_efficiently_represented(p, n, table)[0] for p in candidates):
            uncovered.append(n)
    return CoveringReport(s, N, bad2, uncovered, checked)


def leader_defects(N: int, s: ExactDefect, table: ComplexityTable) -> list[tuple[int, ExactDefect]]:
    """Leaders up to N with defect at most s, paired with their defects."""
    return [
        (n, defect_of(n, table))
        for n in numbers_with_defect_at_most(s, N, table)
        if is_leader(n, table)
    ]
