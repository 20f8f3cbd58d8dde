"""Levi-Civita connection and curvature symbols on Sobolev loop groups.

For left-invariant fields the connection of the H^s metric, as an operator
on Y, is

    2 nabla_X = ad_X - B o ad_{A X} + B o ad_X o A           (minus convention)

with ``A = (1 + Laplacian)^s``, ``B = A^{-1}`` on free loops and
``A = Laplacian^s`` on based loops.  The three pieces are labelled (a), (b)
and (c).  Piece (b) is always assembled; it only reaches a given grade when
the grade arithmetic says so.

The ``plus`` convention (``+ B o ad_{A X}``) is available for auditing: it
breaks torsion-freeness, which :func:`torsion_check` exposes.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import LieAlgebraSpec
from .errors import InvalidInput, SobolevRange
from .fields import SPACES, LoopField, bracket_fields, laplacian_power_apply
from .trig import TrigPoly
from .symbols import (
    NEG_INF,
    Grade,
    Symbol,
    SymbolTerm,
    ad_symbol,
    compose,
    mat_add,
    mat_mul,
    mat_scale,
    mat_zero,
    power_symbol,
    symbol_add,
    zero_symbol,
)

CONVENTIONS = ("minus", "plus")


class Regime(enum.Enum):
    FRACTIONAL = "fractional"  # 1/2 < s < 1
    CRITICAL = "critical"  # s = 1
    SUPERCRITICAL = "supercritical"  # s > 1


@dataclass(frozen=True)
class SobolevParam:
    s: Fraction
    space: str = "free"

    def __post_init__(self):
        s = Fraction(self.s)
        object.__setattr__(self, "s", s)
        if s <= Fraction(1, 2):
            raise SobolevRange(f"Sobolev parameter must exceed 1/2, got {s}")
        if self.space not in SPACES:
            raise InvalidInput(f"unknown space {self.space!r}")

    @property
    def regime(self) -> Regime:
        if self.s < 1:
            return Regime.FRACTIONAL
        if self.s == 1:
            return Regime.CRITICAL
        return Regime.SUPERCRITICAL

    def default_cutoff(self) -> Fraction:
        """One grade below the leading curvature grade ``min(-2, -2s)``."""
        return min(Fraction(-2), -2 * self.s) - 1


def _sign(convention: str) -> int:
    if convention not in CONVENTIONS:
        raise InvalidInput(f"unknown sign convention {convention!r}")
    return -1 if convention == "minus" else 1


def _depth(cutoff: Fraction) -> int:
    return math.ceil(-cutoff / 2) + 1


def _check_field(L: LieAlgebraSpec, X: LoopField, p: SobolevParam, name: str = "X") -> None:
    if X.algebra != L:
        raise InvalidInput(f"{name} does not live over the given algebra")
    if p.space == "based" and not X.is_based():
        raise InvalidInput(f"{name} does not vanish at the base point, required for based loops")


@dataclass(eq=False)
class ConnectionSymbol:
    symbol: Symbol
    X: LoopField
    param: SobolevParam
    cutoff: Fraction
    audit: dict = field(default_factory=dict)
    convention: str = "minus"

    def verify_audit(self) -> bool:
        total = zero_symbol(self.symbol.dim)
        for part in self.audit.values():
            total = symbol_add(total, part)
        return total.truncate(self.cutoff).same_terms(self.symbol)

    def grade(self, value) -> list[SymbolTerm]:
        return [t for t in self.symbol.terms if t.grade.value == Fraction(value)]


@dataclass(eq=False)
class CurvatureSymbol:
    symbol: Symbol
    X: LoopField
    Y: LoopField
    param: SobolevParam
    cutoff: Fraction
    connections: dict = field(default_factory=dict)
    convention: str = "minus"

    @functools.cached_property
    def audit(self) -> dict:
        """Contributions keyed by the (a)/(b)/(c) piece of each factor, e.g.
        ``"X.b*Y.a"`` or ``"-[X,Y].c"``.  Built on first access: it costs about
        as much as the curvature itself."""
        nX, nY, nXY = self.connections["X"], self.connections["Y"], self.connections["[X,Y]"]
        out: dict = {}
        for kx, px in nX.audit.items():
            for ky, py in nY.audit.items():
                out[f"X.{kx}*Y.{ky}"] = compose(px, py, self.cutoff)
                out[f"-Y.{ky}*X.{kx}"] = -compose(py, px, self.cutoff)
        for k, part in nXY.audit.items():
            out[f"-[X,Y].{k}"] = -part.truncate(self.cutoff)
        return out

    def verify_audit(self) -> bool:
        total = zero_symbol(self.symbol.dim)
        for part in self.audit.values():
            total = symbol_add(total, part)
        return total.truncate(self.cutoff).same_terms(self.symbol)

    def grade(self, value) -> list[SymbolTerm]:
        return [t for t in self.symbol.terms if t.grade.value == Fraction(value)]


def _connection_pieces(L, X, p: SobolevParam, cutoff: Fraction, convention: str) -> dict:
    eps = _sign(convention)
    d = L.dim
    depth = _depth(cutoff)
    A = power_symbol(p.space, +1, p.s, depth, d)
    B = power_symbol(p.space, -1, p.s, depth, d)
    AX = laplacian_power_apply(X, p.s, p.space)
    adX = ad_symbol(L, X)
    inner = compose(adX, A, cutoff - B.lead())
    half = Fraction(1, 2)
    return {
        "a": adX.scale(half),
        "b": compose(B, ad_symbol(L, AX), cutoff).scale(half * eps),
        "c": compose(B, inner, cutoff).scale(half),
    }


def connection_symbol(
    L: LieAlgebraSpec,
    X: LoopField,
    p: SobolevParam,
    cutoff=None,
    convention: str = "minus",
) -> ConnectionSymbol:
    """Symbol of ``nabla_X`` acting on Y, complete for grades ``>= cutoff``."""
    _check_field(L, X, p)
    cutoff = p.default_cutoff() if cutoff is None else Fraction(cutoff)
    if cutoff > 0:
        raise InvalidInput("cutoff must be <= 0")
    pieces = _connection_pieces(L, X, p, cutoff, convention)
    total = zero_symbol(L.dim)
    for part in pieces.values():
        total = symbol_add(total, part)
    return ConnectionSymbol(total.truncate(cutoff), X, p, cutoff, pieces, convention)


def curvature_symbol(
    L: LieAlgebraSpec,
    X: LoopField,
    Y: LoopField,
    p: SobolevParam,
    cutoff=None,
    convention: str = "minus",
) -> CurvatureSymbol:
    """Symbol of ``nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]``.

    The (a)/(b)/(c) audit trail is available lazily as ``.audit``; its pieces
    sum to the symbol.
    """
    _check_field(L, X, p, "X")
    _check_field(L, Y, p, "Y")
    cutoff = p.default_cutoff() if cutoff is None else Fraction(cutoff)
    if cutoff > 0:
        raise InvalidInput("cutoff must be <= 0")
    XY = bracket_fields(L, X, Y)
    nX = connection_symbol(L, X, p, cutoff, convention)
    nY = connection_symbol(L, Y, p, cutoff, convention)
    nXY = connection_symbol(L, XY, p, cutoff, convention)
    total = compose(nX.symbol, nY.symbol, cutoff) - compose(nY.symbol, nX.symbol, cutoff) - nXY.symbol
    return CurvatureSymbol(
        total.truncate(cutoff), X, Y, p, cutoff, {"X": nX, "Y": nY, "[X,Y]": nXY}, convention
    )


def leading_order(C) -> Fraction | None:
    """Largest grade carrying a nonzero term, or None if empty down to the cutoff."""
    sym = C.symbol if hasattr(C, "symbol") else C
    lead = sym.lead()
    return None if lead == NEG_INF else lead


@dataclass(eq=False)
class TorsionReport:
    """Torsion ``T(X, Y) = nabla_X Y - nabla_Y X - [X, Y]`` seen two ways.

    ``operator_x`` / ``operator_y`` are the symbols of ``Z -> T(X, Z)`` and
    ``Z -> T(Y, Z)``; ``field`` is the exact field ``T(X, Y)``.
    """

    operator_x: Symbol
    operator_y: Symbol
    field: LoopField

    def is_empty(self) -> bool:
        return self.operator_x.is_empty() and self.operator_y.is_empty() and self.field.is_zero()


def _torsion_operator(L, W: LoopField, p: SobolevParam, cutoff: Fraction, convention: str) -> Symbol:
    # Z -> nabla_W Z - nabla_Z W - [W, Z].  With 2 nabla_Z W = [Z, W] + eps B[AZ, W] + B[Z, AW]
    # the middle map is Z -> -(ad_W + eps B ad_W A + B ad_{AW}) / 2.
    eps = _sign(convention)
    pieces = _connection_pieces(L, W, p, cutoff, convention)
    forward = symbol_add(symbol_add(pieces["a"], pieces["b"]), pieces["c"])
    a = pieces["a"]
    b_plain = pieces["b"].scale(eps)  # (1/2) B ad_{AW}
    c_plain = pieces["c"]  # (1/2) B ad_W A
    backward = -(a + c_plain.scale(eps) + b_plain)
    return (forward - backward - a.scale(2)).truncate(cutoff)


def _inverse_power(Z: LoopField, p: SobolevParam) -> LoopField:
    """Apply ``A^{-1}``; on based loops the zero mode is sent to 0 (pseudo-inverse)."""
    if p.space == "based":
        Z = LoopField(Z.algebra, tuple(c - TrigPoly(c.constant) for c in Z.components))
    return laplacian_power_apply(Z, -p.s, p.space)


def torsion_field(L: LieAlgebraSpec, X: LoopField, Y: LoopField, p: SobolevParam, convention: str = "minus") -> LoopField:
    """Exact field ``nabla_X Y - nabla_Y X - [X, Y]`` via exact Fourier multipliers.

    The arguments of ``A^{-1}`` are summed before it is applied, so on based
    loops no constant mode is inverted unless the convention leaves one behind.
    """
    eps = _sign(convention)
    AX = laplacian_power_apply(X, p.s, p.space)
    AY = laplacian_power_apply(Y, p.s, p.space)
    # 2(nabla_X Y - nabla_Y X) = 2[X, Y] + A^{-1}(eps [AX, Y] + [X, AY] - eps [AY, X] - [Y, AX])
    inner = (
        bracket_fields(L, AX, Y).scale(eps)
        + bracket_fields(L, X, AY)
        - bracket_fields(L, AY, X).scale(eps)
        - bracket_fields(L, Y, AX)
    )
    return _inverse_power(inner, p).scale(Fraction(1, 2))


def torsion_check(
    L: LieAlgebraSpec,
    X: LoopField,
    Y: LoopField,
    p: SobolevParam,
    cutoff=None,
    convention: str = "minus",
) -> TorsionReport:
    _check_field(L, X, p, "X")
    _check_field(L, Y, p, "Y")
    cutoff = p.default_cutoff() if cutoff is None else Fraction(cutoff)
    return TorsionReport(
        _torsion_operator(L, X, p, cutoff, convention),
        _torsion_operator(L, Y, p, cutoff, convention),
        torsion_field(L, X, Y, p, convention),
    )


# --- closed forms used as independent checks ------------------------------

def _ad(L: LieAlgebraSpec, Z: LoopField):
    """Coefficient matrix of ``ad_Z`` (all-None when Z is central or zero)."""
    sym = ad_symbol(L, Z)
    return sym.terms[0].coeff if not sym.is_empty() else mat_zero(L.dim)


def grade_minus_two_closed_form(L: LieAlgebraSpec, X: LoopField, Y: LoopField, s) -> Symbol:
    """``s^2 C^i_{jk} C^j_{lm} X'^l Y'^m xi^{-2}``, i.e. ``s^2 ad_{[X', Y']}``."""
    s = Fraction(s)
    M = _ad(L, bracket_fields(L, X.diff(), Y.diff()))
    return Symbol(L.dim, [SymbolTerm(Grade(-2, 0, -2), 0, mat_scale(M, s * s))])


def fractional_leading_closed_form(L: LieAlgebraSpec, X: LoopField, Y: LoopField, p: SobolevParam) -> Symbol:
    """The five-term grade ``-2s`` curvature term, with ``D = Laplacian^s`` (based)
    or ``(1 + Laplacian)^s`` (free):

        -1/2 ad_{DX} ad_Y - 1/2 ad_X ad_{DY} + 1/2 ad_{DY} ad_X + 1/2 ad_Y ad_{DX} + 1/2 ad_{D[X,Y]}
    """
    DX = laplacian_power_apply(X, p.s, p.space)
    DY = laplacian_power_apply(Y, p.s, p.space)
    DXY = laplacian_power_apply(bracket_fields(L, X, Y), p.s, p.space)
    h = Fraction(1, 2)
    terms = [
        mat_scale(mat_mul(_ad(L, DX), _ad(L, Y)), -h),
        mat_scale(mat_mul(_ad(L, X), _ad(L, DY)), -h),
        mat_scale(mat_mul(_ad(L, DY), _ad(L, X)), h),
        mat_scale(mat_mul(_ad(L, Y), _ad(L, DX)), h),
        mat_scale(_ad(L, DXY), h),
    ]
    M = terms[0]
    for t in terms[1:]:
        M = mat_add(M, t)
    return Symbol(L.dim, [SymbolTerm(Grade(0, -2, -2 * p.s), 0, M)])
