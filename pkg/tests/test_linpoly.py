import numpy as np
import pytest

from qfcodes import gf
from qfcodes.linpoly import (FamilySpec, LinearizedPoly, elements_zech_order,
                             enumerate_family, lin_eval, lin_eval_table)


def test_eval_basics():
    F = gf.get_field(2, 4)
    zero = LinearizedPoly((1,), (0,), 1)
    assert zero.is_zero
    assert lin_eval(F, zero, F.alpha) == 0
    mono = LinearizedPoly((2,), (1,), 1)
    assert lin_eval(F, mono, 1) == 1
    gamma = F.alpha_pow(7)
    R = LinearizedPoly((1,), (gamma,), 1)
    a = F.alpha
    assert lin_eval(F, R, a) == F.mul(gamma, F.mul(a, a))


def test_eval_table_matches_scalar():
    F = gf.get_field(3, 4)
    R = LinearizedPoly((1, 2), (F.alpha, F.alpha_pow(5)), 1)
    tab = lin_eval_table(F, R)
    for x in range(0, 81, 7):
        assert int(tab[x]) == lin_eval(F, R, x)


@pytest.mark.parametrize("p,s,m,exps", [(2, 1, 4, (1,)), (3, 1, 4, (1,)), (2, 2, 4, (1,))])
def test_fq_linearity(p, s, m, exps):
    F = gf.get_field(p, s * m)
    rng = np.random.default_rng(11)
    sub = F.subfield(s)
    for _ in range(25):
        coeffs = tuple(int(rng.integers(0, F.order)) for _ in exps)
        R = LinearizedPoly(exps, coeffs, s)
        x, y = int(rng.integers(0, F.order)), int(rng.integers(0, F.order))
        lam = int(sub.elements[rng.integers(0, len(sub.elements))])
        assert lin_eval(F, R, F.add(x, y)) == F.add(lin_eval(F, R, x), lin_eval(F, R, y))
        assert lin_eval(F, R, F.mul(lam, x)) == F.mul(lam, lin_eval(F, R, x))


def test_enumerate_family_counts_and_order():
    F = gf.get_field(2, 4)
    fam = FamilySpec(2, 1, 4, (1,))
    members = list(enumerate_family(F, fam))
    assert len(members) == 16
    assert members[0].is_zero
    coeffs = [R.coeffs[0] for R in members]
    assert coeffs == [0] + [F.alpha_pow(k) for k in range(15)]
    assert len(set(coeffs)) == 16


def test_enumerate_family_two_exponents():
    F = gf.get_field(2, 4)
    fam = FamilySpec(2, 1, 4, (0, 1))
    members = list(enumerate_family(F, fam))
    assert len(members) == 256
    assert len({R.coeffs for R in members}) == 256


def test_empty_family():
    F = gf.get_field(2, 4)
    fam = FamilySpec(2, 1, 4, ())
    members = list(enumerate_family(F, fam))
    assert len(members) == 1 and members[0].q_exponents == ()


def test_zech_order():
    F = gf.get_field(2, 4)
    order = elements_zech_order(F)
    assert order[0] == 0 and order[1] == 1
    assert len(order) == 16


def test_validation():
    with pytest.raises(Exception):
        FamilySpec(2, 1, 4, (1, 1))
    with pytest.raises(Exception):
        FamilySpec(2, 1, 4, (2, 1))
    fam = FamilySpec(2, 1, 4, (2,))
    with pytest.raises(Exception):
        fam.validate_for_tables()  # l < m/2 fails
    with pytest.raises(Exception):
        LinearizedPoly((1,), (1, 2), 1)
    R = LinearizedPoly((1,), (0,), 1)
    with pytest.raises(Exception):
        R.degree_exponent(2)


def test_degree_exponent():
    R = LinearizedPoly((1, 3), (5, 7), 1)
    assert R.degree_exponent(3) == 3
    R2 = LinearizedPoly((1, 3), (5, 0), 1)
    assert R2.degree_exponent(3) == 1
