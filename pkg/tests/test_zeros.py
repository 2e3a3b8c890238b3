import math

import numpy as np
import pytest

from levlab.dirichlet import (
    count_zeros_argument,
    enumerate_characters,
    find_critical_zeros,
    mean_zero_gap,
    rotated_real_form,
)
from levlab.errors import ParameterError

CHI1 = enumerate_characters(1)[0]


def test_first_zeta_ordinate():
    zl = find_critical_zeros(CHI1, 15.0)
    gammas = zl.ordinates
    assert len(gammas) == 2
    # classical first ordinate (independent: root of the Riemann-Siegel Z)
    import mpmath as mp
    with mp.workdps(20):
        g1 = float(mp.findroot(mp.siegelz, 14.13))
    assert gammas[1] == pytest.approx(g1, abs=1e-8)
    assert gammas[0] == pytest.approx(-g1, abs=1e-8)
    assert all(z.simple for z in zl.zeros)


def test_every_zero_has_a_sign_change():
    chi = [c for c in enumerate_characters(7) if c.is_primitive][0]
    zl = find_critical_zeros(chi, 20.0)
    h = zl.grid_step / 4.0
    for z in zl.zeros:
        assert rotated_real_form(chi, z.gamma - h) * \
            rotated_real_form(chi, z.gamma + h) < 0


def test_count_matches_argument_principle():
    chi3 = [c for c in enumerate_characters(3) if c.is_primitive][0]
    zl = find_critical_zeros(chi3, 30.0, verify=True)
    assert zl.argument_count == len(zl.zeros)
    assert zl.suspected_missed == 0


def test_argument_count_zeta():
    assert count_zeros_argument(CHI1, 15.0) == 2


def test_riemann_von_mangoldt_main_term():
    T = 60.0
    for q in (1, 3, 4, 5):
        for chi in enumerate_characters(q):
            if not chi.is_primitive:
                continue
            n = count_zeros_argument(chi, T)
            main = (T / math.pi) * math.log(q * T / (2 * math.pi * math.e))
            assert abs(n - main) <= 2.0 * math.log(q * T)


def test_contour_near_zero_is_perturbed():
    # aim the contour height straight at a located ordinate; the automatic
    # T-perturbation must still deliver the integer count
    zl = find_critical_zeros(CHI1, 15.0)
    g1 = float(zl.ordinates[1])
    n = count_zeros_argument(CHI1, g1)
    assert n in (0, 2)       # either side of the zero, never a half-count


def test_grid_step_validation():
    gap = mean_zero_gap(1, 30.0)
    with pytest.raises(ParameterError):
        find_critical_zeros(CHI1, 30.0, grid_step=2.0 * gap)


def test_requires_primitive():
    induced = [c for c in enumerate_characters(8)
               if not c.is_primitive and not c.is_principal][0]
    with pytest.raises(ParameterError):
        find_critical_zeros(induced, 10.0)
    with pytest.raises(ParameterError):
        count_zeros_argument(induced, 10.0)


def test_complex_character_asymmetric_zeros():
    # complex chi mod 5: ordinates are not symmetric under t -> -t,
    # but the union over chi and its conjugate is
    prim = [c for c in enumerate_characters(5) if c.is_primitive]
    complex_chi = [c for c in prim if not c.is_real][0]
    zl = find_critical_zeros(complex_chi, 12.0)
    zl_conj = find_critical_zeros(complex_chi.conjugate(), 12.0)
    assert np.allclose(np.sort(-zl.ordinates), zl_conj.ordinates, atol=1e-7)
