import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levlab.constants import levinson_c_r1
from levlab.dirichlet import enumerate_characters
from levlab.errors import CostGuardError, ParameterError
from levlab.mollifier import (
    MollifierShape,
    asymptotic_bilinear,
    coefficients,
    diagonal_main_term,
    direct_bilinear,
    mollifier_value,
    mollifier_values,
    mu_sieve,
    v_closed_form,
    v_sums,
)

CHI1 = enumerate_characters(1)[0]


def brute_bilinear(co, F):
    """O(X^2) reference for the gcd-grouped engine."""
    n = co.length
    s = 0.0 + 0.0j
    for h in range(1, n + 1):
        ch = co[h]
        if ch == 0:
            continue
        for k in range(1, n + 1):
            ck = co[k]
            if ck == 0:
                continue
            g = math.gcd(h, k)
            s += ch * ck * F(h // g, k // g)
    return s


class TestCoefficients:
    def test_examples(self):
        co = coefficients(100.0)
        assert co[1] == 1.0
        assert co[4] == 0.0
        expect2 = -(1.0 / math.sqrt(2.0)) * (1.0 - math.log(2) / math.log(100))
        assert co[2] == pytest.approx(expect2, rel=1e-15)

    def test_rejects_short(self):
        with pytest.raises(ParameterError):
            coefficients(1.5)

    def test_guard(self):
        with pytest.raises(CostGuardError):
            coefficients(2.0e5)

    @settings(max_examples=60, derandomize=True)
    @given(h=st.integers(1, 400))
    def test_bounds_and_squarefree(self, h):
        co = coefficients(400.0)
        mu = mu_sieve(400)
        if mu[h] == 0:
            assert co[h] == 0.0
        assert abs(co[h]) <= h ** -0.5 + 1e-15

    def test_sinh_shape(self):
        shape = MollifierShape(kind="sinh", a=1.3408)
        assert shape(1.0) == pytest.approx(1.0)
        assert shape(0.0) == 0.0
        co = coefficients(50.0, shape)
        assert co[1] == 1.0


class TestMollifierValue:
    def test_direct_finite_sum_mod1(self):
        co = coefficients(10.0)
        mu = mu_sieve(10)
        expect = sum(mu[m] / math.sqrt(m) * (1 - math.log(m) / math.log(10))
                     for m in range(1, 11) if mu[m] != 0)
        got = mollifier_value(co, CHI1, 0.5)
        assert got == pytest.approx(expect, rel=1e-14)

    def test_length_two_is_trivial(self):
        # at X = 2 the m = 2 coefficient carries P(0) = 0, so M = 1
        co = coefficients(2.0)
        assert mollifier_value(co, CHI1, 0.3 + 5j) == pytest.approx(1.0)

    def test_length_three(self):
        chi = [c for c in enumerate_characters(5) if c.is_primitive][0]
        co = coefficients(3.0)
        s = 0.5 + 2j
        expect = 1.0 - chi.values[2] * (1 - math.log(2) / math.log(3)) * 2.0 ** (-s)
        assert mollifier_value(co, chi, s) == pytest.approx(expect, rel=1e-13)

    def test_square_matches_opened_double_sum(self):
        # |M(1/2+it)|^2 = sum_{h,k} c(h) c(k) chi(h) conj(chi(k)) (k/h)^{it}
        chi = [c for c in enumerate_characters(5) if c.is_primitive][1]
        co = coefficients(12.0)
        t = 1.7
        direct = abs(mollifier_value(co, chi, 0.5 + 1j * t)) ** 2
        opened = 0.0 + 0.0j
        for h in range(1, 13):
            for k in range(1, 13):
                opened += (co[h] * co[k] * chi.values[h % 5]
                           * np.conj(chi.values[k % 5]) * (k / h) ** (1j * t))
        assert direct == pytest.approx(opened.real, rel=1e-12, abs=1e-12)
        assert abs(opened.imag) < 1e-12


class TestDirectBilinear:
    def test_matches_brute_force_real(self):
        co = coefficients(90.0)
        for al, be in [(0.0, 0.0), (0.07, -0.04), (0.12, 0.12)]:
            fast = direct_bilinear(co, al, be)
            slow = brute_bilinear(
                co, lambda h1, k1: (h1 * k1) ** -0.5 * h1 ** -al * k1 ** -be)
            assert fast == pytest.approx(slow.real, rel=1e-12)

    def test_matches_brute_force_complex(self):
        co = coefficients(60.0)
        al, be = 0.05 + 0.02j, -0.01 - 0.03j
        fast = direct_bilinear(co, al, be)
        slow = brute_bilinear(
            co, lambda h1, k1: (h1 * k1) ** -0.5
            * np.exp(-al * math.log(h1) - be * math.log(k1)))
        assert fast == pytest.approx(slow, rel=1e-12)

    def test_hand_value_at_x2(self):
        # only the (1,1) term survives at X = 2
        assert direct_bilinear(2.0, 0.3, -0.2) == pytest.approx(1.0)

    def test_guard(self):
        with pytest.raises(CostGuardError):
            direct_bilinear(2.0e5)

    def test_log_residual_decreases(self):
        resid = []
        for X in (1e3, 1e4, 1e5):
            resid.append(abs(direct_bilinear(X) * math.log(X) - 1.0))
        assert resid[0] > resid[1] > resid[2]


class TestAsymptotic:
    def test_zero_case(self):
        assert asymptotic_bilinear(1000.0) == pytest.approx(1 / math.log(1000.0))

    def test_closed_form(self):
        X, al, be = 5e3, 0.01, -0.02
        expect = 1 / math.log(X) + (al + be) / 2 + al * be * math.log(X) / 3
        assert asymptotic_bilinear(X, al, be) == pytest.approx(expect, rel=1e-15)

    def test_derivative_claim(self):
        # d/d alpha of the direct sum tracks d/d alpha of the closed form
        X_seq = (1e3, 1e4)
        errs = []
        for X in X_seq:
            sig = 0.5 - 0.83 / math.log(X)
            al = sig - 0.5
            h = 1e-6
            num = (direct_bilinear(X, al + h, al) -
                   direct_bilinear(X, al - h, al)) / (2 * h)
            ana = 0.5 + al * math.log(X) / 3.0
            errs.append(abs(num - ana) / abs(ana))
        assert errs[1] < errs[0]


class TestVSums:
    def test_asymptotic_specials(self):
        vs = v_sums(1000.0, 0.5)
        assert vs.v1.asymptotic == pytest.approx(-0.5)
        assert vs.v2.asymptotic == pytest.approx(math.log(1000.0) / 3.0)

    def test_v2_theta_substitution(self):
        # under X = qt^theta, sigma = 1/2 - R/log qt: V2 ~ (theta/3) log qt
        theta, R = 0.5, 0.83
        lq = 20.0
        X = math.exp(theta * lq)
        vs = v_sums(X, 0.5 - R / lq)
        assert vs.v2.asymptotic == pytest.approx(theta / 3.0 * lq, rel=1e-12)

    def test_rel_errors_decrease(self):
        for R in (0.5, 0.83, 1.2):
            errs = {"v0": [], "v1": [], "v2": []}
            for X in (1e3, 3e3, 1e4, 3e4):
                sig = 0.5 - R / math.log(X)
                vs = v_sums(X, sig)
                errs["v0"].append(vs.v0.rel_error)
                errs["v1"].append(vs.v1.rel_error)
                errs["v2"].append(vs.v2.rel_error)
            for seq in errs.values():
                assert all(a > b for a, b in zip(seq, seq[1:])), (R, errs)


class TestVClosedForm:
    def test_equal_pair_collapses(self):
        sig, r, qt = 0.46, 1.1, 1e6
        v = v_closed_form(6, 6, sig, r, qt)
        lq = math.log(qt)
        Lr = r * lq

        def polar(arg):
            u = arg - 1.0
            return 1 / u, -1 / u ** 2, 2 / u ** 3

        z0, z1, z2 = polar(2 * sig)
        w0, w1, w2 = polar(2 - 2 * sig)
        Lm = (1 - r) * lq
        expect = ((Lr * Lr * z0 + 2 * Lr * z1 + z2)
                  + qt ** (1 - 2 * sig) * (Lm * Lm * w0 + 2 * Lm * w1 + w2)) / Lr ** 2
        assert v == pytest.approx(expect, rel=1e-12)

    def test_symmetry(self):
        assert v_closed_form(4, 4, 0.45, 1.0, 1e5) == \
            v_closed_form(4, 4, 0.45, 1.0, 1e5)
        assert v_closed_form(2, 3, 0.45, 1.0, 1e5) == \
            pytest.approx(v_closed_form(3, 2, 0.45, 1.0, 1e5), rel=1e-12)

    def test_polar_vs_true_mode(self):
        qt = 1e6
        sig = 0.5 - 0.83 / math.log(qt)
        vp = v_closed_form(2, 3, sig, 10 / 9, qt, "polar")
        vt = v_closed_form(2, 3, sig, 10 / 9, qt, "true")
        rel = abs(vp - vt) / abs(vt)
        assert rel < 3.0 / math.log(qt)
        assert rel > 0.0

    def test_pole_guard(self):
        with pytest.raises(ParameterError):
            v_closed_form(2, 3, 0.5, 1.0, 1e5)


class TestDiagonalMainTerm:
    def test_hand_checkable_x2(self):
        # X = 2: only c(1) = 1 survives, so the sum is V(1,1)
        qt, sig, r = 1e4, 0.45, 1.0
        d = diagonal_main_term(2.0, qt, sig, r)
        assert d.direct == pytest.approx(v_closed_form(1, 1, sig, r, qt),
                                         rel=1e-12)

    def test_paper_point_trend(self):
        ratios = []
        for X in (1e3, 1e4):
            qt = X
            sig = 0.5 - 0.83 / math.log(qt)
            d = diagonal_main_term(X, qt, sig, 10 / 9)
            ratios.append(d.ratio)
        assert abs(ratios[1] - 1) < abs(ratios[0] - 1)

    def test_levinson_choice_trend(self):
        # theta = 1/2, r = 1 against the simplified closed form
        diffs = []
        for X in (1e3, 1e4):
            qt = X ** 2.0
            R = 1.0
            sig = 0.5 - R / math.log(qt)
            d = diagonal_main_term(X, qt, sig, 1.0)
            assert d.predicted == pytest.approx(levinson_c_r1(0.5, R), rel=1e-12)
            diffs.append(abs(d.ratio - 1.0))
        assert diffs[1] < diffs[0]
