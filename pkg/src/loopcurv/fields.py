"""Lie-algebra valued loops with trigonometric-polynomial components."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import LieAlgebraSpec
from .errors import InvalidInput, KernelViolation
from .surd import Surd
from .trig import ExpPoly, TrigPoly

SPACES = ("free", "based")


@dataclass(frozen=True, eq=False)
class LoopField:
    algebra: LieAlgebraSpec
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.algebra.dim:
            raise InvalidInput(
                f"field has {len(comps)} components, algebra has dimension {self.algebra.dim}"
            )
        if not all(isinstance(c, TrigPoly) for c in comps):
            raise InvalidInput("components must be TrigPoly instances")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, algebra: LieAlgebraSpec) -> "LoopField":
        return cls(algebra, tuple(TrigPoly() for _ in range(algebra.dim)))

    @classmethod
    def along(cls, algebra: LieAlgebraSpec, direction: int, poly: TrigPoly) -> "LoopField":
        comps = [TrigPoly() for _ in range(algebra.dim)]
        comps[direction] = poly
        return cls(algebra, tuple(comps))

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def __getitem__(self, j: int) -> TrigPoly:
        return self.components[j]

    def exp_components(self) -> list[ExpPoly]:
        return [c.exp for c in self.components]

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=0)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.components)

    def value_at_zero(self) -> list[Surd]:
        return [c.value_at_zero() for c in self.components]

    def is_based(self) -> bool:
        """True when every component vanishes at theta = 0."""
        return all(v.is_zero() for v in self.value_at_zero())

    def diff(self, order: int = 1) -> "LoopField":
        return LoopField(self.algebra, tuple(c.diff(order) for c in self.components))

    def _check(self, other: "LoopField") -> None:
        if not isinstance(other, LoopField) or other.algebra != self.algebra:
            raise InvalidInput("fields live over different algebras")

    def __add__(self, other: "LoopField") -> "LoopField":
        self._check(other)
        return LoopField(self.algebra, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "LoopField") -> "LoopField":
        self._check(other)
        return LoopField(self.algebra, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "LoopField":
        return LoopField(self.algebra, tuple(-c for c in self.components))

    def scale(self, c) -> "LoopField":
        return LoopField(self.algebra, tuple(p * c for p in self.components))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LoopField):
            return NotImplemented
        return self.algebra == other.algebra and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        parts = [
            f"{label}: {c!r}" for label, c in zip(self.algebra.labels, self.components) if c
        ]
        return "LoopField(" + (", ".join(parts) or "0") + ")"


def bracket_fields(L: LieAlgebraSpec, X: LoopField, Y: LoopField) -> LoopField:
    """Pointwise bracket ``[X, Y]^k = C^k_{ij} X^i Y^j``."""
    if X.algebra != L or Y.algebra != L:
        raise InvalidInput("fields must live over the given algebra")
    out = [ExpPoly.zero() for _ in range(L.dim)]
    xs, ys = X.exp_components(), Y.exp_components()
    for k, i, j, v in L.nonzero():
        if xs[i] and ys[j]:
            out[k] = out[k] + (xs[i] * ys[j]).scale(v)
    return LoopField(L, tuple(TrigPoly._from_exp(e) for e in out))


def multiplier(m: int, s, space: str) -> Surd:
    """Exact Fourier multiplier of the Laplacian power on the mode e^{i m theta}.

    ``free``: (1 + m^2)^s.  ``based``: |m|^{2s}; the zero mode is the kernel of
    the Laplacian, so it maps to 0 for s > 0 and has no image for s < 0.
    """
    s = Fraction(s)
    if space == "free":
        return Surd.power(1 + m * m, s)
    if space == "based":
        if m == 0:
            if s > 0:
                return Surd()
            if s == 0:
                return Surd.rational(1)
            raise KernelViolation("negative Laplacian power applied to a nonzero constant term")
        return Surd.power(m * m, s)
    raise InvalidInput(f"unknown space {space!r}; expected one of {SPACES}")


def laplacian_power_apply(X: LoopField, s, space: str = "free") -> LoopField:
    """Apply ``(1 + Laplacian)^s`` (free) or ``Laplacian^s`` (based) to a field.

    The operator is diagonal on exponentials, so the result is exact.  Check
    ``result.is_rational()`` to see whether irrational radicals appeared.
    """
    if space not in SPACES:
        raise InvalidInput(f"unknown space {space!r}; expected one of {SPACES}")
    s = Fraction(s)
    cache: dict[int, Surd] = {}
    comps = []
    for c in X.components:
        out = ExpPoly.zero()
        for m, coeff in c.exp.coefficients().items():
            if m not in cache:
                cache[m] = multiplier(m, s, space)
            out = out + ExpPoly.monomial(m, coeff * cache[m])
        comps.append(TrigPoly._from_exp(out))
    return LoopField(X.algebra, tuple(comps))


def random_trig(rng: random.Random, degree: int = 3, based: bool = False, denom: int = 4) -> TrigPoly:
    """Random trig polynomial with small rational coefficients.

    With ``based=True`` the constant is chosen so the polynomial vanishes at 0.
    """

    def q() -> Fraction:
        return Fraction(rng.randint(-denom * 2, denom * 2), rng.randint(1, denom))

    cos = {n: q() for n in range(1, degree + 1) if rng.random() < 0.7}
    sin = {n: q() for n in range(1, degree + 1) if rng.random() < 0.7}
    const = -sum(cos.values(), Fraction(0)) if based else q()
    return TrigPoly(const, cos, sin)


def random_field(L: LieAlgebraSpec, rng: random.Random, degree: int = 3, based: bool = False) -> LoopField:
    return LoopField(L, tuple(random_trig(rng, degree, based) for _ in range(L.dim)))
