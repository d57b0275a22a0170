"""Low-defect polynomials, pairs, expressions and trees.

Low-defect polynomials are the read-once multilinear polynomials generated
from positive constants by two rules: the disjoint product ``f ⊗ g`` and the
extension ``f ⊗ x + c``.  A pair ``(f, C)`` also records the base complexity
accumulated by the rules that built it.  Variables are positional: ``x1..xd``
in construction order, and ``⊗`` shifts the right operand's variables past
the left operand's.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod

from sympy import divisors

from intcomplexity import _parse
from intcomplexity.complexity import ComplexityTable, complexity
from intcomplexity.defect import ExactDefect, less_than_int
from intcomplexity.errors import ContractError, IndeterminateError
from intcomplexity.stability import (
    ASSUMED,
    CERTIFIED,
    DEFAULT_HORIZON,
    Policy,
    is_stable,
    stability_scan,
)

Monomial = tuple[int, ...]


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class LowDefectPoly:
    """A multilinear polynomial in ``x1..x_nvars`` with non-negative coefficients.

    ``terms`` maps sorted variable-index tuples to coefficients.  Augmented
    polynomials (``f * x_{d+1}``) set ``augmented`` and have zero constant term.
    """

    nvars: int
    terms: tuple[tuple[Monomial, int], ...]
    augmented: bool = False

    @classmethod
    def from_dict(cls, nvars: int, coeffs: dict, augmented: bool = False) -> "LowDefectPoly":
        items = []
        for mono, c in coeffs.items():
            if c == 0:
                continue
            if c < 0:
                raise ContractError("coefficients must be non-negative")
            mono = tuple(sorted(mono))
            if any(not 1 <= i <= nvars for i in mono) or len(set(mono)) != len(mono):
                raise ContractError(f"bad monomial {mono} for {nvars} variables")
            items.append((mono, c))
        items.sort(key=lambda t: (-len(t[0]), t[0]))
        return cls(nvars, tuple(items), augmented)

    @classmethod
    def constant(cls, k: int) -> "LowDefectPoly":
        if k < 1:
            raise ContractError("constants must be positive")
        return cls(0, (((), k),))

    def coeff(self, mono=()) -> int:
        mono = tuple(sorted(mono))
        for m, c in self.terms:
            if m == mono:
                return c
        return 0

    def as_dict(self) -> dict[Monomial, int]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        """Number of low-defect variables (the augmenting variable excluded)."""
        return self.nvars - 1 if self.augmented else self.nvars

    @property
    def leading_coefficient(self) -> int:
        return self.coeff(tuple(range(1, self.nvars + 1)))

    @property
    def constant_term(self) -> int:
        return self.coeff(())

    def check_structure(self) -> None:
        """Multilinear with positive leading coefficient and, unless augmented, positive constant term."""
        if self.leading_coefficient <= 0:
            raise ContractError("leading coefficient must be positive")
        if self.augmented:
            if self.constant_term != 0:
                raise ContractError("augmented polynomial must have zero constant term")
        elif self.constant_term <= 0:
            raise ContractError("constant term must be positive")

    def evaluate_at(self, values) -> int:
        values = tuple(values)
        if len(values) != self.nvars:
            raise ContractError(f"expected {self.nvars} arguments, got {len(values)}")
        return sum(c * prod(values[i - 1] for i in mono) for mono, c in self.terms)

    def __str__(self) -> str:
        parts = []
        for mono, c in self.terms:
            vars_ = "*".join(f"x{i}" for i in mono)
            if not vars_:
                parts.append(str(c))
            elif c == 1:
                parts.append(vars_)
            else:
                parts.append(f"{c}*{vars_}")
        return " + ".join(parts) if parts else "0"


def _shift(poly: LowDefectPoly, by: int) -> dict:
    return {tuple(i + by for i in mono): c for mono, c in poly.terms}


def poly_tensor(f: LowDefectPoly, g: LowDefectPoly) -> LowDefectPoly:
    """``f ⊗ g``: the product with g's variables renumbered after f's."""
    out: dict[Monomial, int] = {}
    for m1, c1 in f.terms:
        for m2, c2 in _shift(g, f.nvars).items():
            key = m1 + m2
            out[key] = out.get(key, 0) + c1 * c2
    return LowDefectPoly.from_dict(f.nvars + g.nvars, out)


def poly_extend(f: LowDefectPoly, c: int) -> LowDefectPoly:
    """``f ⊗ x + c``."""
    if c < 1:
        raise ContractError("extension constant must be positive")
    x = f.nvars + 1
    out = {mono + (x,): k for mono, k in f.terms}
    out[()] = out.get((), 0) + c
    return LowDefectPoly.from_dict(x, out)


def augment(f: LowDefectPoly) -> LowDefectPoly:
    """The augmented polynomial ``f * x_{d+1}``."""
    if f.augmented:
        raise ContractError("already augmented")
    x = f.nvars + 1
    return LowDefectPoly.from_dict(x, {mono + (x,): k for mono, k in f.terms}, augmented=True)


def evaluate(f: LowDefectPoly, exponents) -> int:
    """``f(3^n1, ..., 3^nd)`` in exact arithmetic."""
    exponents = tuple(exponents)
    if any(e < 0 for e in exponents):
        raise ContractError("exponents must be non-negative")
    if len(exponents) != f.nvars:
        raise ContractError(f"expected {f.nvars} exponents, got {len(exponents)}")
    return f.evaluate_at(3**e for e in exponents)


# ---------------------------------------------------------------------------
# pairs


@dataclass(frozen=True)
class LowDefectPair:
    poly: LowDefectPoly
    C: int

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def leading_coefficient(self) -> int:
        return self.poly.leading_coefficient

    def __str__(self) -> str:
        return f"({self.poly}, C={self.C})"


def const_pair(k: int, C: int | None = None, table: ComplexityTable | None = None) -> LowDefectPair:
    ck = complexity(k, table)
    if C is None:
        C = ck
    if C < ck:
        raise ContractError(f"base complexity {C} below ‖{k}‖ = {ck}")
    return LowDefectPair(LowDefectPoly.constant(k), C)


def tensor(p1: LowDefectPair, p2: LowDefectPair) -> LowDefectPair:
    return LowDefectPair(poly_tensor(p1.poly, p2.poly), p1.C + p2.C)


def extend(
    p: LowDefectPair, c: int, D: int | None = None, table: ComplexityTable | None = None
) -> LowDefectPair:
    """``(f ⊗ x + c, C + D)``; requires ``D >= ‖c‖``."""
    cc = complexity(c, table)
    if D is None:
        D = cc
    if D < cc:
        raise ContractError(f"D = {D} is below ‖{c}‖ = {cc}")
    return LowDefectPair(poly_extend(p.poly, c), p.C + D)


def delta_pair(p: LowDefectPair) -> ExactDefect:
    """``δ(f, C) = C - 3 log_3 a`` with a the leading coefficient."""
    return ExactDefect(p.C, p.leading_coefficient)


def delta_at(p: LowDefectPair, exponents) -> ExactDefect:
    """``δ_{f,C}(n) = C + 3 Σ n_i - 3 log_3 f(3^n1, ...)``."""
    exponents = tuple(exponents)
    if len(exponents) != p.degree:
        raise ContractError(f"expected {p.degree} exponents, got {len(exponents)}")
    return ExactDefect(p.C + 3 * sum(exponents), evaluate(p.poly, exponents))


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Constant:
    value: int

    def __post_init__(self):
        if self.value < 1:
            raise ContractError("constants must be positive")

    nvars = 0

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Product:
    left: "LowDefectExpression"
    right: "LowDefectExpression"

    @property
    def nvars(self) -> int:
        return self.left.nvars + self.right.nvars

    def __str__(self):
        return f"{_wrap(self.left)}*{_wrap(self.right)}"


@dataclass(frozen=True)
class Extend:
    inner: "LowDefectExpression"
    var: int
    const: int

    def __post_init__(self):
        if self.const < 1:
            raise ContractError("constants must be positive")
        if self.var <= _max_var(self.inner):
            raise ContractError("extension variable must be fresh and numbered past the inner ones")

    @property
    def nvars(self) -> int:
        return self.inner.nvars + 1

    def __str__(self):
        inner = self.inner
        if isinstance(inner, Constant) and inner.value == 1:
            return f"x{self.var}+{self.const}"
        return f"{_wrap(inner)}*x{self.var}+{self.const}"


LowDefectExpression = Constant | Product | Extend


def _max_var(e) -> int:
    if isinstance(e, Constant):
        return 0
    if isinstance(e, Product):
        return max(_max_var(e.left), _max_var(e.right))
    return e.var


def _wrap(e) -> str:
    return f"({e})" if isinstance(e, Extend) else str(e)


def _relabel(e, shift: int):
    if shift == 0 or isinstance(e, Constant):
        return e
    if isinstance(e, Product):
        return Product(_relabel(e.left, shift), _relabel(e.right, shift))
    return Extend(_relabel(e.inner, shift), e.var + shift, e.const)


def ld_product(e1, e2) -> Product:
    """``E1 ⊗ E2``: relabels E2's variables to follow E1's."""
    return Product(e1, _relabel(e2, e1.nvars))


def ld_extend(e, c: int) -> Extend:
    """``E ⊗ x + c`` with a fresh variable."""
    return Extend(e, e.nvars + 1, c)


def expr_complexity(e, table: ComplexityTable | None = None) -> int:
    """Sum of the complexities of the constants in ``e``."""
    if isinstance(e, Constant):
        return complexity(e.value, table)
    if isinstance(e, Product):
        return expr_complexity(e.left, table) + expr_complexity(e.right, table)
    return expr_complexity(e.inner, table) + complexity(e.const, table)


def expr_eval_poly(e) -> LowDefectPoly:
    """Evaluate the expression directly as a polynomial."""
    if isinstance(e, Constant):
        return LowDefectPoly.constant(e.value)
    if isinstance(e, Product):
        return poly_tensor(expr_eval_poly(e.left), expr_eval_poly(e.right))
    return poly_extend(expr_eval_poly(e.inner), e.const)


def expr_pair(e, table: ComplexityTable | None = None) -> LowDefectPair:
    return LowDefectPair(expr_to_poly(e), expr_complexity(e, table))


def parse_expression(text: str):
    """Parse read-once text such as ``2*(2*x1+1)`` or ``((2x1+1)x2+1)``.

    Sums must have the shape ``E*x + c`` (either order), with exactly one
    bare variable factor in the product term.  Variable names only need to
    be distinct; they are renumbered in construction order.
    """
    seen: set[str] = set()

    def conv(node):
        kind, payload = node
        if kind == "num":
            return Constant(payload)
        if kind == "var":
            raise ContractError(f"variable {payload} must appear as E*{payload}+c")
        if kind == "mul":
            out = conv(payload[0])
            for f in payload[1:]:
                out = ld_product(out, conv(f))
            return out
        if len(payload) != 2:
            raise ContractError("a sum must have exactly two terms: E*x + c")
        consts = [t for t in payload if t[0] == "num"]
        others = [t for t in payload if t[0] != "num"]
        if len(consts) != 1 or len(others) != 1:
            raise ContractError("a sum must be E*x + c with c a constant")
        term = others[0]
        factors = term[1] if term[0] == "mul" else [term]
        bare = [f for f in factors if f[0] == "var"]
        if len(bare) != 1:
            raise ContractError("the product term of a sum needs exactly one bare variable")
        name = bare[0][1]
        rest = [f for f in factors if f is not bare[0]]
        inner = Constant(1)
        if rest:
            inner = conv(rest[0]) if len(rest) == 1 else conv(("mul", rest))
        if name in seen:
            raise ContractError(f"variable {name} used twice (expressions are read-once)")
        seen.add(name)
        return ld_extend(inner, consts[0][1])

    return conv(_parse.parse(text))


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class LowDefectTree:
    """Rooted tree with positive vertex labels; ``children`` pairs each child with its edge label."""

    label: int
    children: tuple[tuple[int, "LowDefectTree"], ...] = ()

    def __post_init__(self):
        if self.label < 1 or any(e < 1 for e, _ in self.children):
            raise ContractError("tree labels must be positive")

    def vertices(self):
        yield self
        for _, child in self.children:
            yield from child.vertices()

    def edges(self):
        for e, child in self.children:
            yield e
            yield from child.edges()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def to_json(self, edge_label: int | None = None) -> dict:
        return {
            "label": self.label,
            "edge_label": edge_label,
            "children": [c.to_json(e) for e, c in self.children],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LowDefectTree":
        return cls(
            int(data["label"]),
            tuple((int(c["edge_label"]), cls.from_json(c)) for c in data.get("children", [])),
        )


def expr_to_tree(e) -> LowDefectTree:
    if isinstance(e, Constant):
        return LowDefectTree(e.value)
    if isinstance(e, Extend):
        return LowDefectTree(1, ((e.const, expr_to_tree(e.inner)),))
    t1, t2 = expr_to_tree(e.left), expr_to_tree(e.right)
    return LowDefectTree(t1.label * t2.label, t1.children + t2.children)


def tree_to_poly(t: LowDefectTree) -> LowDefectPoly:
    out = LowDefectPoly.constant(t.label)
    for e, child in t.children:
        out = poly_tensor(out, poly_extend(tree_to_poly(child), e))
    return out


def expr_to_poly(e) -> LowDefectPoly:
    return tree_to_poly(expr_to_tree(e))


def tree_complexity(t: LowDefectTree, table: ComplexityTable | None = None) -> int:
    """Edges and leaves count in full; inner vertices only when labelled above 1."""
    total = sum(complexity(e, table) for e in t.edges())
    for v in t.vertices():
        if v.is_leaf or v.label > 1:
            total += complexity(v.label, table)
    return total


def leading_coefficient(obj) -> int:
    if isinstance(obj, LowDefectTree):
        return prod(v.label for v in obj.vertices())
    if isinstance(obj, LowDefectPair):
        return obj.leading_coefficient
    return obj.leading_coefficient


def degree(obj) -> int:
    if isinstance(obj, LowDefectTree):
        return sum(1 for _ in obj.edges())
    return obj.degree


# ---------------------------------------------------------------------------
# substantiality


@dataclass(frozen=True)
class Verdict:
    """A boolean answer with the certificate level it rests on."""

    value: bool
    certificate: str
    method: str

    def __bool__(self) -> bool:
        return self.value


def is_substantial(
    p: LowDefectPair,
    policy: Policy | str = Policy.ASSUME,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
) -> Verdict:
    """Whether ``C = ‖a‖_st + deg f``.

    If ``δ(f, C) < deg f + 1`` the answer is yes without any stability
    lookup.  Otherwise the horizon scan of a gives an upper bound on
    ``‖a‖_st``, which already settles the negative case when
    ``C - deg f`` exceeds it.
    """
    d = p.degree
    if less_than_int(delta_pair(p), d + 1):
        return Verdict(True, CERTIFIED, "basecase")
    v = stability_scan(p.leading_coefficient, horizon, table)
    target = p.C - d
    if target != v.stable_complexity:
        return Verdict(False, CERTIFIED if target > v.stable_complexity else v.certificate, "definition")
    if not v.certified and Policy(policy) is Policy.STRICT:
        raise IndeterminateError(
            f"‖{p.leading_coefficient}‖_st not certified within horizon {horizon}",
            [p.leading_coefficient],
        )
    return Verdict(True, v.certificate, "definition")


def insubstantiality_gap(
    p: LowDefectPair,
    policy: Policy | str = Policy.ASSUME,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
) -> tuple[int, int, str]:
    """``(k, gap, certificate)`` with ``k = C - ‖a‖_st`` and ``gap = k - deg f``."""
    d = p.degree
    if less_than_int(delta_pair(p), d + 1):
        return d, 0, CERTIFIED
    v = stability_scan(p.leading_coefficient, horizon, table)
    if not v.certified and Policy(policy) is Policy.STRICT:
        raise IndeterminateError(
            f"‖{p.leading_coefficient}‖_st not certified within horizon {horizon}",
            [p.leading_coefficient],
        )
    k = p.C - v.stable_complexity
    return k, k - d, v.certificate


def substantial_by_tree(
    t: LowDefectTree,
    policy: Policy | str = Policy.ASSUME,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
) -> Verdict:
    """Read substantiality off the tree: all edges 1, no leaf labelled 1,
    the label product N stable, and ``‖N‖`` equal to the sum of ``‖w(v)‖``
    over labels above 1."""
    if any(e != 1 for e in t.edges()):
        return Verdict(False, CERTIFIED, "tree")
    if any(v.is_leaf and v.label == 1 for v in t.vertices()):
        return Verdict(False, CERTIFIED, "tree")
    N = leading_coefficient(t)
    if complexity(N, table) != sum(complexity(v.label, table) for v in t.vertices() if v.label > 1):
        return Verdict(False, CERTIFIED, "tree")
    stable, cert = is_stable(N, horizon, table, policy)
    return Verdict(stable, cert, "tree")


def canonical_substantial(
    q: int,
    k: int,
    policy: Policy | str = Policy.ASSUME,
    horizon: int = DEFAULT_HORIZON,
    table: ComplexityTable | None = None,
) -> LowDefectPair:
    """``((((q x1 + 1) x2 + 1) ...) xk + 1, ‖q‖ + k)`` for stable q."""
    if k < 0:
        raise ContractError("k must be non-negative")
    stable, _ = is_stable(q, horizon, table, policy)
    if not stable:
        raise ContractError(f"{q} is not stable")
    p = const_pair(q, table=table)
    for _ in range(k):
        p = extend(p, 1, 1, table)
    return p


@dataclass(frozen=True)
class Degree1Form:
    kind: str  # "ax+1", "b(ax+1)" or "other"
    a: int | None
    b: int | None


def degree1_form(p) -> Degree1Form:
    """Write a degree-1 polynomial as ``ax+1`` or ``b(ax+1)`` when possible."""
    poly = p.poly if isinstance(p, LowDefectPair) else p
    if poly.degree != 1 or poly.augmented:
        raise ContractError("degree1_form needs a degree-1 polynomial")
    lead, const = poly.leading_coefficient, poly.constant_term
    if const == 1:
        return Degree1Form("ax+1", lead, 1)
    if lead % const == 0:
        return Degree1Form("b(ax+1)", lead // const, const)
    return Degree1Form("other", None, None)


def absolute_base_complexity(f: LowDefectPoly, table: ComplexityTable | None = None) -> int:
    """``‖f‖``: minimum of the tree complexity over all trees yielding f.

    Only degree <= 2 is supported.  Every tree shape with at most two edges
    and every labelling consistent with the coefficients is tried, over all
    variable orders, so the cost grows with the divisor counts of the
    coefficients.
    """
    if f.augmented:
        raise ContractError("augmented polynomials have no base complexity")
    d = f.degree
    if d > 2:
        raise ContractError("exact ‖f‖ search is implemented for degree <= 2 only")
    cpx = lambda n: complexity(n, table)  # noqa: E731
    inner = lambda r: cpx(r) if r > 1 else 0  # noqa: E731
    if d == 0:
        return cpx(f.constant_term)
    best = None

    def consider(value):
        nonlocal best
        if best is None or value < best:
            best = value

    if d == 1:
        lead, const = f.leading_coefficient, f.constant_term
        for r in divisors(gcd(lead, const)):
            consider(inner(r) + cpx(lead // r) + cpx(const // r))
        return best

    for order in itertools.permutations((1, 2)):
        c12 = f.coeff((1, 2))
        c1 = f.coeff((order[0],))
        c2 = f.coeff((order[1],))
        c0 = f.constant_term
        g = gcd(gcd(c12, c1), gcd(c2, c0))
        for r in divisors(g):
            # star: r (l1 x1 + e1)(l2 x2 + e2)
            if c1:
                for l1 in divisors(gcd(c12 // r, c1 // r)):
                    l2 = c12 // r // l1
                    e2 = c1 // r // l1
                    if (c2 // r) % l2:
                        continue
                    e1 = c2 // r // l2
                    if e1 * e2 * r == c0:
                        consider(inner(r) + cpx(l1) + cpx(e1) + cpx(l2) + cpx(e2))
            # path: r (m (l x1 + e1) x2 + e2), where x1 appears only with x2
            elif c2:
                e2 = c0 // r
                for m in divisors(gcd(c12 // r, c2 // r)):
                    l = c12 // r // m
                    e1 = c2 // r // m
                    consider(inner(r) + cpx(e2) + inner(m) + cpx(e1) + cpx(l))
    if best is None:
        raise ContractError(f"{f} is not a low-defect polynomial")
    return best
