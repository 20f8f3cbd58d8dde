"""Fourier-truncation oracle."""

import json
import random
from fractions import Fraction

import numpy as np
import pytest

from loopcurv.algebra import abelian, su2
from loopcurv.errors import InvalidTruncation, RankDeficient
from loopcurv.fields import LoopField, random_field
from loopcurv.geometry import SobolevParam, connection_symbol
from loopcurv.spectral import (
    TruncatedOperator,
    ad_matrix,
    connection_matrix,
    curvature_matrix,
    estimate_order,
    multiplier_matrix,
    symbol_consistency,
    skew_adjointness_residual,
    torsion_residual,
    trace_partial_sums,
)
from loopcurv.symbols import power_symbol
from loopcurv.trig import TrigPoly

F = Fraction


def zero_op(N, d=1, bandwidth=0):
    import scipy.sparse as sp

    size = d * (2 * N + 1)
    return TruncatedOperator(sp.csr_matrix((size, size), dtype=complex), N, d, bandwidth, {})


class TestMultiplier:
    def test_values(self):
        A = multiplier_matrix(1, +1, 4, 1)
        B = multiplier_matrix(1, -1, 4, 1)
        diag = A.matrix.diagonal()
        assert diag[A.index(0, 0)] == 1
        assert diag[A.index(2, 0)] == pytest.approx(5)
        assert B.matrix.diagonal()[B.index(-2, 0)] == pytest.approx(1 / 5)
        A2 = multiplier_matrix(2, +1, 4, 1)
        assert A2.matrix.diagonal()[A2.index(2, 0)] == pytest.approx(25)
        assert np.allclose((A @ B).dense(), np.eye(A.size))

    def test_based_zero_mode(self):
        A = multiplier_matrix(F(3, 4), +1, 4, 2, "based")
        assert A.matrix.diagonal()[A.index(0, 1)] == 0
        assert A.matrix.diagonal()[A.index(4, 1)] == pytest.approx(4**1.5)

    def test_slope(self):
        est = estimate_order(multiplier_matrix(1, -1, 512, 1), (32, 256))
        assert abs(est.slope + 2) <= 0.01
        assert 0 <= est.r_squared <= 1


class TestAd:
    def test_abelian_zero(self):
        A = abelian(3)
        M = ad_matrix(A, random_field(A, random.Random(1)), 8)
        assert M.matrix.count_nonzero() == 0

    def test_constant_block_diagonal(self, L):
        e = LoopField.along(L, 0, TrigPoly(1))
        M = ad_matrix(L, e, 3).dense()
        block = np.array([[float(x) for x in row] for row in L.ad_matrix([1, 0, 0])])
        for n in range(-3, 4):
            i = (n + 3) * 3
            assert np.allclose(M[i:i + 3, i:i + 3], block)
        assert np.count_nonzero(M) == 7 * np.count_nonzero(block)

    def test_sin_e_on_mode_one_f(self, L, example):
        X, _ = example
        M = ad_matrix(L, X, 4)
        col = M.column(1, 1)
        # -2 sin(theta) e^{i theta} g = i e^{2 i theta} g - i g
        assert col[M.index(2, 2)] == pytest.approx(1j)
        assert col[M.index(0, 2)] == pytest.approx(-1j)
        assert np.count_nonzero(np.abs(col) > 1e-15) == 2

    def test_degree_exceeds_N(self, L):
        X = LoopField.along(L, 0, TrigPoly(cos={5: 1}))
        with pytest.raises(InvalidTruncation):
            ad_matrix(L, X, 4)


class TestConnection:
    def test_abelian(self):
        A = abelian(2)
        M = connection_matrix(A, random_field(A, random.Random(2)), 2, 16)
        assert M.matrix.count_nonzero() == 0 or np.abs(M.dense()).max() == 0

    @pytest.mark.parametrize("s", [F(3, 4), F(1), F(2)])
    def test_skew_adjoint(self, L, s):
        X = random_field(L, random.Random(3), 2)
        assert skew_adjointness_residual(connection_matrix(L, X, s, 64), s) <= 1e-8

    @pytest.mark.parametrize("s", [F(3, 4), F(1), F(2)])
    def test_torsion_free(self, L, s):
        rng = random.Random(4)
        X, Y = random_field(L, rng, 3), random_field(L, rng, 3)
        assert torsion_residual(L, X, Y, s) <= 1e-10

    def test_plus_convention_has_torsion(self, L, example):
        X, Y = example
        assert torsion_residual(L, X, Y, 2, convention="plus") > 1e-3


class TestCurvature:
    def test_antisymmetry_and_diagonal(self, L):
        rng = random.Random(5)
        X, Y = random_field(L, rng, 2), random_field(L, rng, 2)
        Kxy = curvature_matrix(L, X, Y, F(3, 2), 32)
        Kyx = curvature_matrix(L, Y, X, F(3, 2), 32)
        assert np.abs((Kxy + Kyx).dense()).max() <= 1e-12
        assert np.abs(curvature_matrix(L, X, X, 2, 32).dense()).max() == 0

    def test_padding_metadata(self, L, example):
        X, Y = example
        K = curvature_matrix(L, X, Y, 2, 40)
        assert K.N == 40 and K.bandwidth == 2 and K.meta["padding"] == 2

    def test_order_s2(self, L, example):
        X, Y = example
        est = estimate_order(curvature_matrix(L, X, Y, 2, 512), (32, 256))
        assert abs(est.slope + 2) <= 0.1
        rows = est.to_csv().splitlines()
        assert rows[0] == "n,norm,fitted" and len(rows) == 256 - 32 + 2
        assert json.loads(json.dumps(est.to_json()))["freq_window"] == [32, 256]


class TestEstimate:
    def test_zero_operator(self):
        with pytest.raises(RankDeficient):
            estimate_order(zero_op(300), (32, 256))

    def test_window_validation(self, L, example):
        X, Y = example
        K = curvature_matrix(L, X, Y, 2, 100)
        with pytest.raises(InvalidTruncation):
            estimate_order(K, (2, 50))
        with pytest.raises(InvalidTruncation):
            estimate_order(K, (32, 99))


class TestTrace:
    def test_zero(self):
        rep = trace_partial_sums(zero_op(256))
        assert np.all(rep.partial_sums == 0)

    def test_diagonal_tail(self):
        # singular values (1+n^2)^{-2}: tails over [K, 2K) shrink by about 8 per doubling
        rep = trace_partial_sums(multiplier_matrix(2, -1, 256, 1))
        assert rep.cauchy_tail_ok(2.0)
        assert all(r > 6 for r in rep.tail_ratios.values())

    def test_small_N_rejected(self):
        with pytest.raises(InvalidTruncation):
            trace_partial_sums(zero_op(64))


class TestConsistency:
    def test_pure_multiplier_exact(self):
        s = F(3, 2)
        sym = power_symbol("based", -1, s, 1)
        M = multiplier_matrix(s, -1, 300, 1, "based")
        errs = symbol_consistency(sym, M, (64, 128, 256))
        assert max(errs.values()) <= 1e-13

    def test_connection_falloff(self, L, example):
        X, _ = example
        C = connection_symbol(L, X, SobolevParam(2), -3)
        M = connection_matrix(L, X, 2, 300)
        errs = symbol_consistency(C, M, (64, 128, 256))
        assert errs[64] > errs[128] > errs[256]
        assert errs[256] <= 1e-2
