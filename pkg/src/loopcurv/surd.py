"""Exact scalars: Q(i) extended by real radicals of positive rationals.

Fourier multipliers such as ``(1 + n**2) ** (3/4)`` are irrational, but they
are always products of prime powers with rational exponents.  A value is
stored as a finite sum

    sum_k  q_k * i**e_k * prod_p p**f_{k,p}

with ``q_k`` rational, ``e_k`` in {0, 1} and every ``f_{k,p}`` in (0, 1).
Distinct radical monomials in this normal form are linearly independent
over Q(i), so a value is zero exactly when its term map is empty.

Rational coefficients are held as ``gmpy2.mpq`` internally (they compare and
hash equal to ``fractions.Fraction``); the public accessors return Fractions.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from gmpy2 import mpq

# A key is (power of i, ((prime, exponent), ...)) with primes ascending.
Key = tuple
ONE_KEY: Key = (0, ())
I_KEY: Key = (1, ())


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of a positive integer by trial division."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def key_mul(k1: Key, k2: Key) -> tuple[Key, mpq]:
    """Product of two monomial keys as (key, rational factor)."""
    ipow = k1[0] + k2[0]
    factor = mpq(1)
    if ipow == 2:
        ipow = 0
        factor = mpq(-1)
    if not k2[1]:
        return (ipow, k1[1]), factor
    if not k1[1]:
        return (ipow, k2[1]), factor
    exps = dict(k1[1])
    for p, e in k2[1]:
        exps[p] = exps.get(p, 0) + e
    rad = []
    for p in sorted(exps):
        e = exps[p]
        if e >= 1:
            e -= 1
            factor *= p
        if e:
            rad.append((p, e))
    return (ipow, tuple(rad)), factor


@lru_cache(maxsize=1 << 14)
def key_value(key: Key) -> complex:
    v = 1.0
    for p, e in key[1]:
        v *= float(p) ** float(e)
    return complex(0.0, v) if key[0] else complex(v, 0.0)


_MPQ = type(mpq())
SCALARS = (int, Fraction, _MPQ)


def _coerce_rational(x) -> mpq:
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, (int, Fraction, Rational)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


class Surd:
    """Immutable exact number in Q(i)[radicals]."""

    __slots__ = ("_t", "_h")

    def __init__(self, terms: dict | None = None):
        self._t = {k: mpq(v) for k, v in (terms or {}).items() if v}
        self._h = None

    @classmethod
    def _raw(cls, terms: dict) -> "Surd":
        obj = cls.__new__(cls)
        obj._t = terms
        obj._h = None
        return obj

    @classmethod
    def rational(cls, q) -> "Surd":
        q = _coerce_rational(q)
        return cls._raw({ONE_KEY: q} if q else {})

    @classmethod
    def i(cls) -> "Surd":
        return cls._raw({I_KEY: mpq(1)})

    @classmethod
    def power(cls, base, exponent) -> "Surd":
        """Exact ``base ** exponent`` for rational base >= 0 and rational exponent."""
        base = _coerce_rational(base)
        exponent = _coerce_rational(exponent)
        if base < 0:
            raise ValueError("negative base")
        if base == 0:
            if exponent > 0:
                return cls()
            if exponent == 0:
                return cls.rational(1)
            raise ZeroDivisionError("0 raised to a negative power")
        if exponent.denominator == 1:
            return cls.rational(base ** exponent.numerator)
        coeff = mpq(1)
        exps: dict[int, Fraction] = {}
        for p, k in factorize(base.numerator):
            exps[p] = exps.get(p, 0) + k * exponent
        for p, k in factorize(base.denominator):
            exps[p] = exps.get(p, 0) - k * exponent
        rad = []
        for p in sorted(exps):
            t = exps[p]
            whole = math.floor(t)
            frac = t - whole
            coeff *= mpq(p) ** whole
            if frac:
                rad.append((p, frac))
        return cls._raw({(0, tuple(rad)): coeff})

    @classmethod
    def coerce(cls, x) -> "Surd":
        if isinstance(x, Surd):
            return x
        return cls.rational(x)

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_rational(self) -> bool:
        return all(k == ONE_KEY for k in self._t)

    def is_real(self) -> bool:
        return all(k[0] == 0 for k in self._t)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self._t.get(ONE_KEY, 0))

    def real(self) -> "Surd":
        return Surd._raw({k: v for k, v in self._t.items() if k[0] == 0})

    def imag(self) -> "Surd":
        return Surd._raw({(0, k[1]): v for k, v in self._t.items() if k[0] == 1})

    def conjugate(self) -> "Surd":
        return Surd._raw({k: (-v if k[0] else v) for k, v in self._t.items()})

    def __bool__(self) -> bool:
        return bool(self._t)

    def __neg__(self) -> "Surd":
        return Surd._raw({k: -v for k, v in self._t.items()})

    def __add__(self, other) -> "Surd":
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._t)
        for k, v in other._t.items():
            w = out.get(k, 0) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return Surd._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Surd":
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Surd":
        return Surd.coerce(other) - self

    def __mul__(self, other) -> "Surd":
        if isinstance(other, SCALARS):
            if not other:
                return Surd()
            return Surd._raw({k: v * other for k, v in self._t.items()})
        if not isinstance(other, Surd):
            return NotImplemented
        out: dict = {}
        for k1, v1 in self._t.items():
            for k2, v2 in other._t.items():
                k, f = key_mul(k1, k2)
                w = out.get(k, 0) + v1 * v2 * f
                if w:
                    out[k] = w
                else:
                    out.pop(k, None)
        return Surd._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.is_rational():
                other = other.to_fraction()
            elif len(other._t) == 1:
                return self * other.inverse()
            else:
                raise ValueError("division by a multi-term surd is not supported")
        q = _coerce_rational(other)
        if not q:
            raise ZeroDivisionError("division by zero")
        return Surd._raw({k: v / q for k, v in self._t.items()})

    def inverse(self) -> "Surd":
        """Inverse of a single-monomial value."""
        if len(self._t) != 1:
            raise ValueError("only monomials are invertible here")
        (key, q), = self._t.items()
        rad = Surd.rational(1)
        for p, e in key[1]:
            rad = rad * Surd.power(p, -e)
        out = rad / q
        if key[0]:
            out = out * Surd.rational(-1) * Surd.i()
        return out

    def __pow__(self, n: int) -> "Surd":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Surd.rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __complex__(self) -> complex:
        return sum((key_value(k) * float(v) for k, v in self._t.items()), 0j)

    def __float__(self) -> float:
        if not self.is_real():
            raise TypeError("complex value has no float")
        return complex(self).real

    def __eq__(self, other) -> bool:
        if isinstance(other, Surd):
            return self._t == other._t
        try:
            return self._t == Surd.coerce(other)._t
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def __repr__(self) -> str:
        return f"Surd({str(self)!r})"

    def __str__(self) -> str:
        return format_surd(self)


def _format_key(key: Key) -> str:
    parts = []
    if key[0]:
        parts.append("i")
    for p, e in key[1]:
        parts.append(f"{p}^({e})")
    return "*".join(parts)


def format_surd(x: Surd) -> str:
    """Render as an exact string, e.g. ``"1/2 - 3*i*2^(1/2)"``."""
    if x.is_zero():
        return "0"
    chunks = []
    for key in sorted(x._t, key=lambda k: (k[0], k[1])):
        q = x._t[key]
        sign = "-" if q < 0 else "+"
        mag = abs(q)
        body = _format_key(key)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        chunks.append((sign, text))
    first_sign, first = chunks[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, text in chunks[1:]:
        out += f" {sign} {text}"
    return out


_FACTOR = re.compile(r"^(?:(\d+(?:/\d+)?)|i|(\d+)\^\((\d+(?:/\d+)?)\))$")


def parse_surd(text: str) -> Surd:
    """Inverse of :func:`format_surd`."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty number")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise ValueError(f"cannot parse {text!r}")
    total = Surd()
    for piece in pieces:
        sign = -1 if piece.startswith("-") else 1
        piece = piece.lstrip("+-")
        term = Surd.rational(sign)
        for factor in piece.split("*"):
            m = _FACTOR.match(factor)
            if not m:
                raise ValueError(f"bad factor {factor!r} in {text!r}")
            if m.group(1) is not None:
                term = term * Fraction(m.group(1))
            elif factor == "i":
                term = term * Surd.i()
            else:
                term = term * Surd.power(int(m.group(2)), Fraction(m.group(3)))
        total = total + term
    return total
