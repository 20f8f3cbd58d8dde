"""Trigonometric polynomials with exact coefficients.

:class:`ExpPoly` is the working representation: a finite sum
``sum_m c_m e^{i m theta}`` with coefficients in the exact ring of
:mod:`loopcurv.surd`, stored flat as ``{(m, key): rational}``.  Products are
convolutions and derivatives are diagonal, so everything stays exact.

:class:`TrigPoly` is the real-valued view used for loop-field components.  It
is backed by an :class:`ExpPoly` whose coefficients satisfy
``c_{-m} = conj(c_m)`` and exposes the familiar constant / cos / sin form.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from gmpy2 import mpq

from .surd import I_KEY, ONE_KEY, SCALARS, Surd, key_mul, key_value

_I = I_KEY


def _accumulate(out: dict, key, value) -> None:
    w = out.get(key, 0) + value
    if w:
        out[key] = w
    else:
        out.pop(key, None)


class ExpPoly:
    """Complex exponential polynomial with exact coefficients."""

    __slots__ = ("_t", "_h", "_g")

    def __init__(self, terms: dict | None = None):
        self._t = {k: mpq(v) for k, v in (terms or {}).items() if v}
        self._h = None
        self._g = None

    @classmethod
    def _raw(cls, terms: dict) -> "ExpPoly":
        obj = cls.__new__(cls)
        obj._t = terms
        obj._h = None
        obj._g = None
        return obj

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls._raw({})

    @classmethod
    def constant(cls, value) -> "ExpPoly":
        return cls.monomial(0, value)

    @classmethod
    def monomial(cls, m: int, value) -> "ExpPoly":
        value = Surd.coerce(value)
        return cls._raw({(m, k): v for k, v in value.terms.items()})

    @classmethod
    def from_coefficients(cls, coeffs: dict) -> "ExpPoly":
        out: dict = {}
        for m, c in coeffs.items():
            for k, v in Surd.coerce(c).terms.items():
                _accumulate(out, (m, k), v)
        return cls._raw(out)

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def frequencies(self) -> list[int]:
        return sorted({m for m, _ in self._t})

    def degree(self) -> int:
        return max((abs(m) for m, _ in self._t), default=0)

    def coefficient(self, m: int) -> Surd:
        return Surd({k: v for (n, k), v in self._t.items() if n == m})

    def coefficients(self) -> dict[int, Surd]:
        out: dict[int, dict] = {}
        for (m, k), v in self._t.items():
            out.setdefault(m, {})[k] = v
        return {m: Surd(t) for m, t in sorted(out.items())}

    def complex_coefficients(self) -> dict[int, complex]:
        out: dict[int, complex] = {}
        for (m, k), v in self._t.items():
            out[m] = out.get(m, 0j) + key_value(k) * float(v)
        return out

    def is_rational(self) -> bool:
        """True when every coefficient lies in Q(i)."""
        return all(not k[1] for _, k in self._t)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly._raw({k: -v for k, v in self._t.items()})

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        out = dict(self._t)
        for k, v in other._t.items():
            _accumulate(out, k, v)
        return ExpPoly._raw(out)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ExpPoly":
        """Multiply by an exact scalar (int, Fraction or Surd)."""
        if isinstance(c, SCALARS):
            if not c:
                return ExpPoly.zero()
            if c == 1:
                return self
            c = mpq(c)
            return ExpPoly._raw({k: v * c for k, v in self._t.items()})
        c = Surd.coerce(c)
        out: dict = {}
        for (m, k1), v1 in self._t.items():
            for k2, v2 in c.terms.items():
                k, f = key_mul(k1, k2)
                _accumulate(out, (m, k), v1 * v2 * f)
        return ExpPoly._raw(out)

    def _groups(self) -> dict:
        """Terms grouped by radical key: ``{key: [(m, value), ...]}`` (cached)."""
        g = self._g
        if g is None:
            g = {}
            for (m, k), v in self._t.items():
                g.setdefault(k, []).append((m, v))
            self._g = g
        return g

    @staticmethod
    def dot(pairs) -> "ExpPoly":
        """``sum a * b`` over ``(a, b)`` pairs, accumulated in one pass."""
        acc: dict = {}
        for a, b in pairs:
            if not a._t or not b._t:
                continue
            gb = b._groups()
            for k1, la in a._groups().items():
                for k2, lb in gb.items():
                    k, f = key_mul(k1, k2)
                    out = acc.get(k)
                    if out is None:
                        out = acc[k] = {}
                    get = out.get
                    for m1, v1 in la:
                        if f != 1:
                            v1 = v1 * f
                        for m2, v2 in lb:
                            m = m1 + m2
                            out[m] = get(m, 0) + v1 * v2
        return ExpPoly._raw({(m, k): v for k, out in acc.items() for m, v in out.items() if v})

    def __mul__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        return ExpPoly.dot(((self, other),))

    def __rmul__(self, other) -> "ExpPoly":
        return self.scale(other)

    def diff(self, order: int = 1) -> "ExpPoly":
        """Exact ``order``-th derivative in theta: c_m -> (i m)^order c_m."""
        if order < 0:
            raise ValueError("order must be non-negative")
        if order == 0:
            return self
        sign = -1 if order % 4 in (2, 3) else 1
        odd = order % 2 == 1
        out: dict = {}
        for (m, k), v in self._t.items():
            if m == 0:
                continue
            coeff = v * sign * m**order
            if odd:
                k, f = key_mul(k, _I)
                coeff *= f
            out[(m, k)] = coeff
        return ExpPoly._raw(out)

    def dpow(self, order: int) -> "ExpPoly":
        """``(-i d/dtheta)^order``: c_m -> m^order c_m (no factors of i)."""
        if order == 0:
            return self
        return ExpPoly._raw({(m, k): v * m**order for (m, k), v in self._t.items() if m})

    def conj(self) -> "ExpPoly":
        """Pointwise complex conjugate as a function of theta."""
        return ExpPoly._raw({(-m, k): (-v if k[0] else v) for (m, k), v in self._t.items()})

    def real_part(self) -> "TrigPoly":
        return TrigPoly._from_exp((self + self.conj()).scale(Fraction(1, 2)))

    def imag_part(self) -> "TrigPoly":
        # (f - conj f) / (2i) = -i/2 * (f - conj f)
        return TrigPoly._from_exp((self - self.conj()).scale(Surd.i() * Fraction(-1, 2)))

    def is_real(self) -> bool:
        return self == self.conj()

    def __call__(self, theta: float) -> complex:
        total = 0j
        for (m, k), v in self._t.items():
            total += key_value(k) * float(v) * cmath.exp(1j * m * theta)
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def __repr__(self) -> str:
        if not self._t:
            return "ExpPoly(0)"
        parts = [f"({c})e^{{{m}i}}" for m, c in self.coefficients().items()]
        return "ExpPoly(" + " + ".join(parts) + ")"


def _half(x: Surd) -> Surd:
    return x * Fraction(1, 2)


class TrigPoly:
    """Real trigonometric polynomial ``a_0 + sum_n (a_n cos n theta + b_n sin n theta)``.

    Coefficients are exact (rationals, or real surds after a fractional
    Laplacian power).  The canonical form stores no zero entries, so ``==``
    is mathematical equality.
    """

    __slots__ = ("_e",)

    def __init__(self, constant=0, cos: dict | None = None, sin: dict | None = None):
        out: dict = {}
        for k, v in Surd.coerce(constant).terms.items():
            _accumulate(out, (0, k), v)
        half_i = Surd.i() * Fraction(1, 2)
        for n, c in (cos or {}).items():
            if n < 1:
                raise ValueError("cos harmonics need n >= 1")
            h = _half(Surd.coerce(c))
            for k, v in h.terms.items():
                _accumulate(out, (n, k), v)
                _accumulate(out, (-n, k), v)
        for n, c in (sin or {}).items():
            if n < 1:
                raise ValueError("sin harmonics need n >= 1")
            # sin = (e^{in} - e^{-in}) / 2i  ->  c_n = -i c / 2, c_{-n} = i c / 2
            h = Surd.coerce(c) * half_i
            for k, v in h.terms.items():
                _accumulate(out, (n, k), -v)
                _accumulate(out, (-n, k), v)
        self._e = ExpPoly._raw(out)

    @classmethod
    def _from_exp(cls, e: ExpPoly) -> "TrigPoly":
        obj = cls.__new__(cls)
        obj._e = e
        return obj

    @classmethod
    def from_exp(cls, e: ExpPoly) -> "TrigPoly":
        if not e.is_real():
            raise ValueError("exponential polynomial is not real-valued")
        return cls._from_exp(e)

    @property
    def exp(self) -> ExpPoly:
        return self._e

    @property
    def constant(self) -> Surd:
        return self._e.coefficient(0)

    def cos_coeff(self, n: int) -> Surd:
        return self._e.coefficient(n) + self._e.coefficient(-n)

    def sin_coeff(self, n: int) -> Surd:
        return (self._e.coefficient(n) - self._e.coefficient(-n)) * Surd.i()

    def harmonics(self) -> dict[int, tuple[Surd, Surd]]:
        out = {}
        for n in sorted({abs(m) for m in self._e.frequencies() if m}):
            a, b = self.cos_coeff(n), self.sin_coeff(n)
            if a or b:
                out[n] = (a, b)
        return out

    def degree(self) -> int:
        return self._e.degree()

    def is_zero(self) -> bool:
        return self._e.is_zero()

    def is_rational(self) -> bool:
        return self._e.is_rational()

    def __bool__(self) -> bool:
        return not self._e.is_zero()

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return TrigPoly._from_exp(self._e + other._e)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return TrigPoly._from_exp(self._e - other._e)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly._from_exp(-self._e)

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return trig_mul(self, other)
        if isinstance(other, Surd) and not other.is_real():
            return NotImplemented
        try:
            return TrigPoly._from_exp(self._e.scale(other))
        except TypeError:
            return NotImplemented

    def __rmul__(self, other) -> "TrigPoly":
        return self.__mul__(other)

    def diff(self, order: int = 1) -> "TrigPoly":
        return trig_diff(self, order)

    def __call__(self, theta: float) -> float:
        return self._e(theta).real

    def value_at_zero(self) -> Surd:
        """Exact value at theta = 0 (sum of all exponential coefficients)."""
        total = Surd()
        for c in self._e.coefficients().values():
            total = total + c
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._e == other._e

    def __hash__(self) -> int:
        return hash(self._e)

    def __repr__(self) -> str:
        return f"TrigPoly({format_trig(self)})"


def trig_mul(a: TrigPoly, b: TrigPoly) -> TrigPoly:
    """Exact product; convolution of exponential coefficients."""
    return TrigPoly._from_exp(a.exp * b.exp)


def trig_diff(a: TrigPoly, order: int = 1) -> TrigPoly:
    """Exact ``order``-th theta-derivative."""
    return TrigPoly._from_exp(a.exp.diff(order))


def format_exp(e: ExpPoly) -> str:
    """Format a complex trig polynomial as ``re`` or ``re + i*(im)``."""
    if e.is_zero():
        return "0"
    re_part, im_part = e.real_part(), e.imag_part()
    if im_part.is_zero():
        return format_trig(re_part)
    if re_part.is_zero():
        return f"i*({format_trig(im_part)})"
    return f"{format_trig(re_part)} + i*({format_trig(im_part)})"


def format_trig(p: TrigPoly) -> str:
    if isinstance(p, ExpPoly):
        return format_exp(p)
    if p.is_zero():
        return "0"
    parts = []
    if p.constant:
        parts.append(str(p.constant))
    for n, (a, b) in p.harmonics().items():
        arg = "θ" if n == 1 else f"{n}θ"
        if a:
            parts.append(f"({a})cos{arg}")
        if b:
            parts.append(f"({b})sin{arg}")
    return " + ".join(parts)


def l2_norm(p: ExpPoly) -> float:
    """Norm of the coefficient sequence (equals the normalized L2 norm)."""
    return math.sqrt(sum(abs(c) ** 2 for c in p.complex_coefficients().values()))


__all__ = ["ExpPoly", "TrigPoly", "trig_mul", "trig_diff", "format_trig", "format_exp", "l2_norm", "ONE_KEY"]
