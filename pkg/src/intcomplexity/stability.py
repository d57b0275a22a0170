"""Stability verdicts, stable complexity and the gap ``Δ(n) = ‖n‖ - ‖n‖_st``.

A number n is stable when ``‖3^k n‖ = ‖n‖ + 3k`` for every k.  Along the
sequence ``3^k n`` the defect never increases and drops by whole numbers,
so a scan certifies instability at the first drop.  Stability is certified
when the scan reaches a defect below 1: nothing non-negative lies a whole
number below it.  Anything else is reported as unknown at the scan horizon.
"""

from __future__ import annotations

import enum
import weakref
from dataclasses import dataclass, field
from math import prod

from intcomplexity.complexity import ComplexityTable, complexity, default_table
from intcomplexity.defect import ExactDefect, less_than_int
from intcomplexity.errors import ContractError, IndeterminateError

DEFAULT_HORIZON = 12

CERTIFIED = "certified"
ASSUMED = "horizon-assumed"


class Kind(str, enum.Enum):
    STABLE = "StableCertified"
    UNSTABLE = "UnstableCertified"
    UNKNOWN = "UnknownAtHorizon"


class Policy(str, enum.Enum):
    """What to do when a needed stability verdict is not certified."""

    STRICT = "strict"
    ASSUME = "assume"


@dataclass(frozen=True)
class StabilityVerdict:
    n: int
    kind: Kind
    horizon: int
    stable_complexity: int
    certificate: str
    K: int | None = None
    K_lower_bound: bool = False
    witness_k: int | None = None
    scanned: tuple[int, ...] = field(default=(), repr=False)

    @property
    def certified(self) -> bool:
        return self.certificate == CERTIFIED

    @property
    def is_stable(self) -> bool | None:
        if self.kind is Kind.STABLE:
            return True
        if self.kind is Kind.UNSTABLE:
            return False
        return None

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "kind": self.kind.value,
            "K": self.K,
            "K_lower_bound": self.K_lower_bound,
            "witness_k": self.witness_k,
            "horizon": self.horizon,
            "stable_complexity": self.stable_complexity,
            "certificate": self.certificate,
        }


_cache: "weakref.WeakKeyDictionary[ComplexityTable, dict]" = weakref.WeakKeyDictionary()


def _resolve(table):
    return default_table() if table is None else table


def stable_by_small_defect(n: int, table: ComplexityTable | None = None) -> bool:
    """True when ``δ(n) < 1``, which forces n to be stable (sound, not complete)."""
    if table is not None:
        table.require(n)
    return less_than_int(ExactDefect(complexity(n, table), n), 1)


def stability_scan(
    n: int, horizon: int = DEFAULT_HORIZON, table: ComplexityTable | None = None
) -> StabilityVerdict:
    """Scan ``‖3^k n‖`` for ``k = 0..horizon``.

    The scan stops early once the defect of ``3^k n`` falls below 1, since
    every later term is then certified to keep the same defect.
    """
    if n < 1:
        raise ContractError("n must be positive")
    if horizon < 0:
        raise ContractError("horizon must be >= 0")
    table = _resolve(table)
    memo = _cache.setdefault(table, {})
    key = (n, horizon)
    if key in memo:
        return memo[key]

    adjusted: list[int] = []  # ‖3^k n‖ - 3k
    closed = False
    m = n
    for k in range(horizon + 1):
        c = complexity(m, table)
        a = c - 3 * k
        if adjusted and a > adjusted[-1]:
            raise AssertionError(f"defect increased along 3^k*{n} at k={k}")
        adjusted.append(a)
        if less_than_int(ExactDefect(c, m), 1):
            closed = True
            break
        m *= 3

    drops = [k for k in range(1, len(adjusted)) if adjusted[k] < adjusted[k - 1]]
    st = adjusted[-1]
    if closed and not drops:
        verdict = StabilityVerdict(n, Kind.STABLE, horizon, st, CERTIFIED, K=0, scanned=tuple(adjusted))
    elif drops:
        verdict = StabilityVerdict(
            n,
            Kind.UNSTABLE,
            horizon,
            st,
            CERTIFIED if closed else ASSUMED,
            K=drops[-1],
            K_lower_bound=not closed,
            witness_k=drops[0],
            scanned=tuple(adjusted),
        )
    else:
        verdict = StabilityVerdict(n, Kind.UNKNOWN, horizon, st, ASSUMED, scanned=tuple(adjusted))
    memo[key] = verdict
    return verdict


def _check_policy(verdict: StabilityVerdict, policy: Policy | str, what: str) -> None:
    if Policy(policy) is Policy.STRICT and not verdict.certified:
        raise IndeterminateError(
            f"{what} of {verdict.n} not certified within horizon {verdict.horizon}", [verdict.n]
        )


def stable_complexity(
    n: int,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
) -> tuple[int, str]:
    """``‖n‖_st`` with its certificate level."""
    v = stability_scan(n, horizon, table)
    _check_policy(v, policy, "stable complexity")
    return v.stable_complexity, v.certificate


def stable_defect(
    n: int,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
) -> tuple[ExactDefect, str]:
    st, cert = stable_complexity(n, horizon, table, policy)
    return ExactDefect(st, n), cert


def delta_gap(
    n: int,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
) -> tuple[int, str]:
    """``Δ(n) = ‖n‖ - ‖n‖_st``."""
    st, cert = stable_complexity(n, horizon, table, policy)
    return complexity(n, table) - st, cert


def k_of(
    n: int,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
) -> tuple[int | None, str]:
    """``K(n)``, the least k making ``3^k n`` stable.

    Under ``assume`` an uncertified answer is the horizon-observed value,
    which is a lower bound on the true K.
    """
    v = stability_scan(n, horizon, table)
    _check_policy(v, policy, "K")
    if v.kind is Kind.UNKNOWN:
        return 0, v.certificate
    return v.K, v.certificate


def is_stable(
    n: int,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
    policy: Policy | str = Policy.ASSUME,
) -> tuple[bool, str]:
    """Stability of n under the policy; ``assume`` treats unknown as stable."""
    v = stability_scan(n, horizon, table)
    if v.kind is Kind.UNKNOWN:
        _check_policy(v, policy, "stability")
        return True, ASSUMED
    return v.kind is Kind.STABLE, CERTIFIED


@dataclass
class GoodfacReport:
    """Both directions of the factorization/stability propagation rule.

    Tri-state fields are True, False or None (indeterminate).
    """

    N: int
    factors: tuple[int, ...]
    additive: bool  # ‖N‖ = Σ‖n_i‖
    stable_additive: bool | None  # ‖N‖_st = Σ‖n_i‖_st
    stable_additive_certificate: str
    N_stable: bool | None
    factors_stable: tuple[bool | None, ...]
    direction1_applies: bool | None
    direction1_consistent: bool | None
    direction2_applies: bool | None
    direction2_consistent: bool | None
    upgraded: StabilityVerdict | None = None

    def to_json(self) -> dict:
        return {
            "N": str(self.N),
            "factors": [str(f) for f in self.factors],
            "additive": self.additive,
            "stable_additive": self.stable_additive,
            "stable_additive_certificate": self.stable_additive_certificate,
            "N_stable": self.N_stable,
            "factors_stable": list(self.factors_stable),
            "direction1_applies": self.direction1_applies,
            "direction1_consistent": self.direction1_consistent,
            "direction2_applies": self.direction2_applies,
            "direction2_consistent": self.direction2_consistent,
            "upgraded": None if self.upgraded is None else self.upgraded.to_json(),
        }


def _and(values):
    values = list(values)
    if any(v is False for v in values):
        return False
    if any(v is None for v in values):
        return None
    return True


def goodfac_check(
    factors,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
) -> GoodfacReport:
    """Check the factorization rule on ``N = prod(factors)``.

    (1) N stable and ``‖N‖ = Σ‖n_i‖`` imply every n_i stable.
    (2) every n_i stable and ``‖N‖_st = Σ‖n_i‖_st`` imply N stable.
    When the hypotheses of (2) are certified while N itself is unresolved,
    N's verdict is upgraded to certified stable.
    """
    factors = tuple(int(f) for f in factors)
    if len(factors) < 2 or any(f <= 1 for f in factors):
        raise ContractError("need at least two factors, each greater than 1")
    N = prod(factors)
    vN = stability_scan(N, horizon, table)
    vf = [stability_scan(f, horizon, table) for f in factors]
    additive = complexity(N, table) == sum(complexity(f, table) for f in factors)
    st_sum = sum(v.stable_complexity for v in vf)
    all_cert = vN.certified and all(v.certified for v in vf)
    st_cert = CERTIFIED if all_cert else ASSUMED
    stable_additive = vN.stable_complexity == st_sum
    factors_stable = tuple(v.is_stable for v in vf)

    d1_applies = _and([vN.is_stable, additive])
    d1_consistent = None if d1_applies is None else (not d1_applies or _and(factors_stable))
    st_add_tristate = stable_additive if all_cert else None
    d2_applies = _and([*factors_stable, st_add_tristate])
    upgraded = None
    if d2_applies and vN.kind is Kind.UNKNOWN:
        upgraded = StabilityVerdict(
            N, Kind.STABLE, horizon, vN.stable_complexity, CERTIFIED, K=0, scanned=vN.scanned
        )
    n_stable = True if upgraded is not None else vN.is_stable
    d2_consistent = None if d2_applies is None else (not d2_applies or bool(n_stable))
    return GoodfacReport(
        N,
        factors,
        additive,
        stable_additive,
        st_cert,
        n_stable,
        factors_stable,
        d1_applies,
        d1_consistent,
        d2_applies,
        d2_consistent,
        upgraded,
    )
