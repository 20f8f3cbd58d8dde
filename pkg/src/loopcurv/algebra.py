"""Finite-dimensional Lie algebras given by exact structure constants.

The basis is taken to be orthonormal for an ad-invariant inner product, so
the metric is the identity and ad-invariance reads ``C[k][i][j] == -C[j][i][k]``.
Structure constants are indexed ``C[k][i][j]`` with ``[e_i, e_j] = C[k][i][j] e_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidAlgebra


@dataclass(frozen=True)
class LieAlgebraSpec:
    dim: int
    structure: tuple  # C[k][i][j] as nested tuples of Fraction
    labels: tuple = field(default=())
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise InvalidAlgebra(f"dimension must be a positive integer, got {self.dim!r}")
        d = self.dim
        C = self.structure
        if len(C) != d or any(len(row) != d for row in C) or any(
            len(col) != d for row in C for col in row
        ):
            raise InvalidAlgebra(f"structure constants must be a {d}x{d}x{d} array")
        frozen = tuple(tuple(tuple(Fraction(x) for x in col) for col in row) for row in C)
        object.__setattr__(self, "structure", frozen)
        if self.labels and len(self.labels) != d:
            raise InvalidAlgebra("one label per basis vector expected")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{k + 1}" for k in range(d)))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict, labels=(), name: str = "") -> "LieAlgebraSpec":
        """Build from ``{(i, j): {k: value}}`` meaning ``[e_i, e_j] = sum_k value e_k``.

        Antisymmetric partners are filled in automatically.
        """
        C = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), out in brackets.items():
            for k, v in out.items():
                C[k][i][j] = Fraction(v)
                C[k][j][i] = -Fraction(v)
        return cls(dim, C, tuple(labels), name)

    def C(self, k: int, i: int, j: int) -> Fraction:
        return self.structure[k][i][j]

    def as_array(self) -> np.ndarray:
        return np.array([[[float(x) for x in col] for col in row] for row in self.structure])

    def nonzero(self):
        """Iterate ``(k, i, j, value)`` over nonzero structure constants."""
        for k, row in enumerate(self.structure):
            for i, col in enumerate(row):
                for j, v in enumerate(col):
                    if v:
                        yield k, i, j, v

    def is_abelian(self) -> bool:
        return not any(True for _ in self.nonzero())

    def bracket(self, x, y) -> list[Fraction]:
        """Bracket of two constant vectors."""
        out = [Fraction(0)] * self.dim
        for k, i, j, v in self.nonzero():
            out[k] += v * x[i] * y[j]
        return out

    def ad_matrix(self, x) -> list[list[Fraction]]:
        """Matrix of ad_x, entry [i][k] = C^i_{jk} x^j."""
        d = self.dim
        out = [[Fraction(0)] * d for _ in range(d)]
        for k, i, j, v in self.nonzero():
            out[k][j] += v * x[i]
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "labels": list(self.labels),
            "structure": [[[str(x) for x in col] for col in row] for row in self.structure],
        }


def antisymmetry_residual(L: LieAlgebraSpec) -> Fraction:
    d = L.dim
    return max(
        (abs(L.C(k, i, j) + L.C(k, j, i)) for k in range(d) for i in range(d) for j in range(d)),
        default=Fraction(0),
    )


def ad_invariance_residual(L: LieAlgebraSpec) -> Fraction:
    """max |C^k_{ij} + C^j_{ik}|; zero for an orthonormal ad-invariant basis."""
    d = L.dim
    return max(
        (abs(L.C(k, i, j) + L.C(j, i, k)) for k in range(d) for i in range(d) for j in range(d)),
        default=Fraction(0),
    )


def jacobi_residual(L: LieAlgebraSpec) -> Fraction:
    """Largest cyclic Jacobi sum over all index quadruples.

    Evaluates ``sum_j (C^i_{mj} C^j_{lk} - C^i_{lj} C^j_{mk} - C^i_{jk} C^j_{ml})``
    for every (i, k, l, m) and returns the maximum absolute value.
    """
    if not isinstance(L, LieAlgebraSpec):
        raise InvalidAlgebra("expected a LieAlgebraSpec")
    d = L.dim
    C = L.structure
    worst = Fraction(0)
    for i, k, l, m in itertools.product(range(d), repeat=4):
        total = Fraction(0)
        for j in range(d):
            total += C[i][m][j] * C[j][l][k] - C[i][l][j] * C[j][m][k] - C[i][j][k] * C[j][m][l]
        if abs(total) > worst:
            worst = abs(total)
    return worst


def su2() -> LieAlgebraSpec:
    """su(2) with [e,f] = -2g, [e,g] = 2f, [f,g] = -2e."""
    return LieAlgebraSpec.from_brackets(
        3,
        {(0, 1): {2: -2}, (0, 2): {1: 2}, (1, 2): {0: -2}},
        labels=("e", "f", "g"),
        name="su2",
    )


def so3(scale=1) -> LieAlgebraSpec:
    """so(3) with [e_i, e_j] = scale * eps_ijk e_k."""
    c = Fraction(scale)
    return LieAlgebraSpec.from_brackets(
        3,
        {(0, 1): {2: c}, (1, 2): {0: c}, (2, 0): {1: c}},
        name="so3" if c == 1 else f"so3[{c}]",
    )


def abelian(d: int = 3) -> LieAlgebraSpec:
    zero = [[[0] * d for _ in range(d)] for _ in range(d)]
    return LieAlgebraSpec(d, zero, name=f"abelian{d}")


def builtin(name: str) -> LieAlgebraSpec:
    """Resolve ``su2``, ``so3``, ``abelianN``."""
    key = name.strip().lower()
    if key == "su2":
        return su2()
    if key == "so3":
        return so3()
    if key.startswith("abelian"):
        rest = key[len("abelian"):] or "3"
        if not rest.isdigit() or int(rest) < 1:
            raise InvalidAlgebra(f"unknown algebra {name!r}")
        return abelian(int(rest))
    raise InvalidAlgebra(f"unknown algebra {name!r}")
