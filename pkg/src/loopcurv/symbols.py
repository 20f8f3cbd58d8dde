"""Graded pseudodifferential symbols on the circle.

A symbol is a finite sum of terms ``M(theta) * sgn(xi)**p * |xi|**g`` where
``M`` is a d x d matrix of exact exponential polynomials, ``p`` is 0 or 1 and
the grade ``g = a + b*s`` is carried both symbolically and as its exact value
at the session's Sobolev parameter.  Terms whose grades have equal value are
merged, so coincidences such as ``-2s == -2`` at ``s = 1`` are detected by
exact equality.

Composition uses the asymptotic product formula

    sigma(P Q) ~ sum_alpha (1 / (i^alpha alpha!)) d_xi^alpha sigma(P) * d_theta^alpha sigma(Q)

truncated at an explicit cutoff.  Every symbol records the grade down to
which it is complete, so missing depth raises instead of silently dropping terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .algebra import LieAlgebraSpec
from .errors import BelowCutoff, InsufficientDepth, InvalidInput, SobolevRange
from .fields import SPACES, LoopField
from .surd import Surd
from .trig import ExpPoly

NEG_INF = float("-inf")
HALF = Fraction(1, 2)


@total_ordering
class Grade:
    """Exponent ``a + b*s`` together with its exact value."""

    __slots__ = ("a", "b", "value")

    def __init__(self, a, b: int, value):
        self.a = Fraction(a)
        self.b = int(b)
        self.value = Fraction(value)

    @classmethod
    def of(cls, a, b: int, s) -> "Grade":
        return cls(a, b, Fraction(a) + b * Fraction(s))

    def shift(self, k) -> "Grade":
        return Grade(self.a + k, self.b, self.value + k)

    def __add__(self, other: "Grade") -> "Grade":
        return Grade(self.a + other.a, self.b + other.b, self.value + other.value)

    def __eq__(self, other) -> bool:
        if isinstance(other, Grade):
            return self.value == other.value
        return self.value == other

    def __lt__(self, other) -> bool:
        if isinstance(other, Grade):
            return self.value < other.value
        return self.value < other

    def __hash__(self) -> int:
        return hash(self.value)

    def label(self) -> str:
        """Human-readable form such as ``-2s-1`` or ``-2``."""
        parts = []
        if self.b:
            coeff = {1: "", -1: "-"}.get(self.b, str(self.b))
            parts.append(f"{coeff}s")
        if self.a or not parts:
            a = str(self.a)
            parts.append(a if not parts or self.a < 0 else f"+{a}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Grade({self.label()} = {self.value})"


def _preferred(g1: Grade, g2: Grade) -> Grade:
    return min(g1, g2, key=lambda g: (abs(g.b), g.b, g.a))


# --- matrices of exponential polynomials (None entries are zero) ---------

def mat_zero(d: int) -> tuple:
    return tuple((None,) * d for _ in range(d))


def mat_identity(d: int) -> tuple:
    one = ExpPoly.constant(1)
    return tuple(tuple(one if i == k else None for k in range(d)) for i in range(d))


def _norm_entry(e):
    return e if e is not None and e else None


def mat_from_rows(rows) -> tuple:
    return tuple(tuple(_norm_entry(e) for e in row) for row in rows)


def mat_is_zero(M) -> bool:
    return all(e is None for row in M for e in row)


def mat_add(A, B) -> tuple:
    out = []
    for ra, rb in zip(A, B):
        row = []
        for x, y in zip(ra, rb):
            if x is None:
                row.append(y)
            elif y is None:
                row.append(x)
            else:
                row.append(_norm_entry(x + y))
        out.append(tuple(row))
    return tuple(out)


def mat_scale(M, c) -> tuple:
    return tuple(tuple(None if e is None else _norm_entry(e.scale(c)) for e in row) for row in M)


def mat_mul(A, B) -> tuple:
    d = len(A)
    cols = [[B[l][k] for l in range(d)] for k in range(d)]
    out = []
    for i in range(d):
        row = []
        for k in range(d):
            pairs = [(a, b) for a, b in zip(A[i], cols[k]) if a is not None and b is not None]
            row.append(_norm_entry(ExpPoly.dot(pairs)) if pairs else None)
        out.append(tuple(row))
    return tuple(out)


def mat_diff(M, order: int) -> tuple:
    if order == 0:
        return M
    return tuple(tuple(None if e is None else _norm_entry(e.diff(order)) for e in row) for row in M)


def mat_dpow(M, order: int) -> tuple:
    """Entrywise ``(-i d/dtheta)^order``."""
    if order == 0:
        return M
    return tuple(tuple(None if e is None else _norm_entry(e.dpow(order)) for e in row) for row in M)


def mat_entry(M, i: int, k: int) -> ExpPoly:
    e = M[i][k]
    return ExpPoly.zero() if e is None else e


def mat_equal(A, B) -> bool:
    return all(
        (x or ExpPoly.zero()) == (y or ExpPoly.zero()) for ra, rb in zip(A, B) for x, y in zip(ra, rb)
    )


@dataclass(frozen=True, eq=False)
class SymbolTerm:
    grade: Grade
    parity: int
    coeff: tuple

    def entry(self, i: int, k: int) -> ExpPoly:
        return mat_entry(self.coeff, i, k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolTerm):
            return NotImplemented
        return (
            self.grade == other.grade
            and self.parity == other.parity
            and mat_equal(self.coeff, other.coeff)
        )

    def __repr__(self) -> str:
        sgn = "sgn(ξ)·" if self.parity else ""
        return f"SymbolTerm({sgn}|ξ|^({self.grade.label()}))"


def _as_cutoff(c):
    if c is None or c == NEG_INF:
        return NEG_INF
    return Fraction(c)


class Symbol:
    """Finite graded symbol, complete for every grade ``>= cutoff``."""

    __slots__ = ("dim", "cutoff", "_terms")

    def __init__(self, dim: int, terms=(), cutoff=NEG_INF):
        self.dim = dim
        self.cutoff = _as_cutoff(cutoff)
        acc: dict = {}
        for t in terms:
            _merge(acc, t.grade, t.parity, t.coeff)
        self._terms = self._finish(acc)

    @classmethod
    def _from_acc(cls, dim: int, acc: dict, cutoff) -> "Symbol":
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.cutoff = _as_cutoff(cutoff)
        obj._terms = obj._finish(acc)
        return obj

    def _finish(self, acc: dict) -> dict:
        return {
            key: (g, M)
            for key, (g, M) in acc.items()
            if not mat_is_zero(M) and g.value >= self.cutoff
        }

    @property
    def terms(self) -> list[SymbolTerm]:
        keys = sorted(self._terms, key=lambda k: (-k[0], k[1]))
        return [SymbolTerm(self._terms[k][0], k[1], self._terms[k][1]) for k in keys]

    def is_empty(self) -> bool:
        return not self._terms

    def lead(self):
        return max((k[0] for k in self._terms), default=NEG_INF)

    def grades(self) -> list[Fraction]:
        return sorted({k[0] for k in self._terms}, reverse=True)

    def _acc(self) -> dict:
        return dict(self._terms)

    def __add__(self, other: "Symbol") -> "Symbol":
        return symbol_add(self, other)

    def __neg__(self) -> "Symbol":
        return self.scale(-1)

    def __sub__(self, other: "Symbol") -> "Symbol":
        return symbol_add(self, -other)

    def scale(self, c) -> "Symbol":
        acc = {k: (g, mat_scale(M, c)) for k, (g, M) in self._terms.items()}
        return Symbol._from_acc(self.dim, acc, self.cutoff)

    def truncate(self, cutoff) -> "Symbol":
        cutoff = _as_cutoff(cutoff)
        return Symbol._from_acc(self.dim, self._acc(), max(cutoff, self.cutoff))

    def is_rational(self) -> bool:
        return all(e.is_rational() for _, M in self._terms.values() for row in M for e in row if e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Symbol):
            return NotImplemented
        if self.dim != other.dim or self.cutoff != other.cutoff:
            return False
        if set(self._terms) != set(other._terms):
            return False
        return all(mat_equal(self._terms[k][1], other._terms[k][1]) for k in self._terms)

    def same_terms(self, other: "Symbol") -> bool:
        """Equality of terms, ignoring the recorded cutoffs."""
        if self.dim != other.dim or set(self._terms) != set(other._terms):
            return False
        return all(mat_equal(self._terms[k][1], other._terms[k][1]) for k in self._terms)

    def __repr__(self) -> str:
        inner = ", ".join(repr(t) for t in self.terms)
        return f"Symbol(dim={self.dim}, cutoff={self.cutoff}, [{inner}])"


def _merge(acc: dict, grade: Grade, parity: int, M) -> None:
    key = (grade.value, parity % 2)
    if key in acc:
        g0, M0 = acc[key]
        acc[key] = (_preferred(g0, grade), mat_add(M0, M))
    else:
        acc[key] = (grade, M)


def identity_symbol(d: int) -> Symbol:
    return Symbol(d, [SymbolTerm(Grade(0, 0, 0), 0, mat_identity(d))])


def zero_symbol(d: int, cutoff=NEG_INF) -> Symbol:
    return Symbol(d, (), cutoff)


def symbol_add(P: Symbol, Q: Symbol) -> Symbol:
    """Termwise sum; the result is complete only down to the larger cutoff."""
    if P.dim != Q.dim:
        raise InvalidInput(f"dimension mismatch: {P.dim} vs {Q.dim}")
    acc = P._acc()
    for (value, parity), (g, M) in Q._terms.items():
        _merge(acc, g, parity, M)
    return Symbol._from_acc(P.dim, acc, max(P.cutoff, Q.cutoff))


def _falling(x: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= x - j
    return out


def compose(P: Symbol, Q: Symbol, cutoff) -> Symbol:
    """Symbol of ``P o Q``, exact for all grades ``>= cutoff``."""
    if P.dim != Q.dim:
        raise InvalidInput(f"dimension mismatch: {P.dim} vs {Q.dim}")
    cutoff = _as_cutoff(cutoff)
    if cutoff == NEG_INF:
        raise InvalidInput("composition needs a finite cutoff")
    lead_p, lead_q = P.lead(), Q.lead()
    required = max(P.cutoff + lead_q, Q.cutoff + lead_p)
    if required > cutoff:
        raise InsufficientDepth(
            f"inputs are only complete enough for cutoff >= {required}, requested {cutoff}",
            required=required,
        )
    if P.is_empty() or Q.is_empty():
        return zero_symbol(P.dim, cutoff)

    # (1/(i^a a!)) d_xi^a sigma_P d_theta^a sigma_Q = (1/a!) d_xi^a sigma_P (-i d_theta)^a sigma_Q,
    # and (-i d_theta)^a only multiplies mode m by m^a, so every factor stays rational.
    # Products landing on the same (grade, parity) and matrix entry are
    # collected first and reduced with a single fused dot product.
    d = P.dim
    p_terms, q_terms = P.terms, Q.terms
    derivs: dict = {}
    pending: dict = {}  # (value, parity) -> (Grade, d x d lists of (a, b) pairs)
    alpha = 0
    while lead_p + lead_q - alpha >= cutoff:
        inv_fact = Fraction(1, math.factorial(alpha))
        for tp in p_terms:
            fall = _falling(tp.grade.value, alpha)
            if not fall:
                continue
            dgrade = tp.grade.shift(-alpha)
            scaled_p = None
            for iq, tq in enumerate(q_terms):
                if dgrade.value + tq.grade.value < cutoff:
                    break  # q_terms are sorted by decreasing grade
                key = (iq, alpha)
                if key not in derivs:
                    derivs[key] = mat_dpow(tq.coeff, alpha)
                dq = derivs[key]
                if mat_is_zero(dq):
                    continue
                if scaled_p is None:
                    scaled_p = mat_scale(tp.coeff, fall * inv_fact)
                grade = dgrade + tq.grade
                slot_key = (grade.value, (tp.parity + alpha + tq.parity) % 2)
                slot = pending.get(slot_key)
                if slot is None:
                    slot = pending[slot_key] = (grade, [[[] for _ in range(d)] for _ in range(d)])
                elif _preferred(slot[0], grade) is not slot[0]:
                    pending[slot_key] = slot = (grade, slot[1])
                cells = slot[1]
                for i in range(d):
                    row = scaled_p[i]
                    for l in range(d):
                        a = row[l]
                        if a is None:
                            continue
                        brow = dq[l]
                        for k in range(d):
                            b = brow[k]
                            if b is not None:
                                cells[i][k].append((a, b))
        alpha += 1
    acc: dict = {}
    for slot_key, (grade, cells) in pending.items():
        M = tuple(tuple(_norm_entry(ExpPoly.dot(c)) if c else None for c in row) for row in cells)
        acc[slot_key] = (grade, M)
    return Symbol._from_acc(P.dim, acc, cutoff)


def binomial(x: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient C(x, k)."""
    return _falling(Fraction(x), k) / math.factorial(k)


def power_symbol(space: str, exponent_sign: int, s, depth: int, dim: int = 1) -> Symbol:
    """Symbol of ``(1 + Laplacian)^{+-s}`` (free) or ``Laplacian^{+-s}`` (based).

    The free symbol is the binomial series ``sum_k C(+-s, k) |xi|^{+-2s-2k}``
    truncated after ``depth`` terms; the based symbol is the single exact term
    ``|xi|^{+-2s}``.  Coefficients are multiples of the ``dim`` x ``dim`` identity.
    """
    s = Fraction(s)
    if exponent_sign not in (1, -1):
        raise InvalidInput("exponent_sign must be +1 or -1")
    if space not in SPACES:
        raise InvalidInput(f"unknown space {space!r}")
    if s == 0:
        return identity_symbol(dim)
    if s <= HALF:
        raise SobolevRange(f"Sobolev parameter must exceed 1/2, got {s}")
    if depth < 1:
        raise InvalidInput("depth must be at least 1")
    eye = mat_identity(dim)
    if space == "based":
        return Symbol(dim, [SymbolTerm(Grade(0, 2 * exponent_sign, 2 * exponent_sign * s), 0, eye)])
    exponent = exponent_sign * s
    terms = []
    last = None
    for k in range(depth):
        c = binomial(exponent, k)
        g = Grade(-2 * k, 2 * exponent_sign, 2 * exponent - 2 * k)
        last = g.value
        if c:
            terms.append(SymbolTerm(g, 0, mat_scale(eye, c)))
    terminates = exponent.denominator == 1 and exponent >= 0 and depth > exponent
    return Symbol(dim, terms, NEG_INF if terminates else last)


def ad_symbol(L: LieAlgebraSpec, X: LoopField) -> Symbol:
    """Order-zero multiplication symbol with entries ``C^i_{jk} X^j``."""
    if X.algebra != L:
        raise InvalidInput("field does not live over the given algebra")
    d = L.dim
    rows = [[None] * d for _ in range(d)]
    xs = X.exp_components()
    for k, i, j, v in L.nonzero():
        if not xs[i]:
            continue
        term = xs[i].scale(v)
        rows[k][j] = term if rows[k][j] is None else rows[k][j] + term
    M = mat_from_rows(rows)
    return Symbol(d, [SymbolTerm(Grade(0, 0, 0), 0, M)])


def grade_extract(P: Symbol, grade) -> list[SymbolTerm]:
    """Terms of ``P`` at the given grade value (at most one per parity)."""
    value = grade.value if isinstance(grade, Grade) else Fraction(grade)
    if value < P.cutoff:
        raise BelowCutoff(f"grade {value} lies below the symbol cutoff {P.cutoff}")
    return [t for t in P.terms if t.grade.value == value]


def symbol_from_matrix(M, grade: Grade, parity: int = 0, dim: int | None = None) -> Symbol:
    d = dim or len(M)
    return Symbol(d, [SymbolTerm(grade, parity, M)])
