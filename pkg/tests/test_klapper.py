import numpy as np
import pytest

from qfcodes import gf, klapper, quadform
from qfcodes.klapper import HypothesisError
from qfcodes.linpoly import LinearizedPoly
from qfcodes.quadform import QuadForm


def test_classify_examples():
    F16 = gf.get_field(2, 4)
    cls = klapper.classify_monomial(F16, 1, 4, 1, 1)
    assert (cls.rank, cls.type) == (2, -1)
    F81 = gf.get_field(3, 4)
    cls = klapper.classify_monomial(F81, 1, 4, F81.alpha, 1)  # t = 1 is generic
    assert (cls.rank, cls.type) == (4, 1)
    F9 = gf.get_field(3, 2)
    cls = klapper.classify_monomial(F9, 1, 2, F9.alpha_pow(2), 1)  # t = 2 = L/2 mod 4
    assert cls.rank == 0 and cls.type is None


def test_classify_errors():
    F16 = gf.get_field(2, 4)
    with pytest.raises(HypothesisError):
        klapper.classify_monomial(F16, 1, 4, 0, 1)
    F8 = gf.get_field(2, 3)
    with pytest.raises(HypothesisError):
        klapper.classify_monomial(F8, 1, 3, 1, 1)  # m_l odd


@pytest.mark.parametrize("p,s,m,ell", [(2, 1, 4, 1), (3, 1, 4, 1), (2, 1, 6, 1)])
def test_classify_agrees_with_profile(p, s, m, ell):
    ctx = gf.get_field(p, s * m)
    for g in ctx.exp[: ctx.mult_order]:
        cls = klapper.classify_monomial(ctx, s, m, int(g), ell)
        prof = quadform.profile(QuadForm(ctx, s, m, LinearizedPoly((ell,), (int(g),), s)))
        assert (cls.rank, cls.type) == (prof.rank, prof.type)


def test_m_counts():
    assert klapper.m_counts(2, 8, 1) == (85, 170)
    assert klapper.m_counts(3, 4, 1) == (20, 60)
    assert klapper.m_counts(2, 8, 2) == (51, 204)
    # exhaustive power count oracle for (3,4,1)
    F81 = gf.get_field(3, 4)
    powers = {F81.pow(int(g), 4) for g in F81.exp[:80]}
    assert len(powers) == 20


def test_gcd_identity_grid():
    for (q, m, ell) in [(2, 4, 1), (2, 6, 1), (2, 8, 1), (2, 8, 2), (3, 4, 1),
                        (4, 4, 1), (5, 4, 1), (3, 8, 1)]:
        assert klapper.gcd_identity(q, m, ell)


def test_rank_distribution_monomial():
    d = klapper.rank_distribution_monomial(2, 8, 1)
    assert d.as_dict() == {(8, 1): 170, (6, -1): 85}
    d = klapper.rank_distribution_monomial(2, 4, 1)
    assert d.as_dict() == {(4, 1): 10, (2, -1): 5}
    d = klapper.rank_distribution_monomial(3, 4, 1)
    assert d.as_dict() == {(4, 1): 60, (2, -1): 20}
    with pytest.raises(HypothesisError):
        klapper.rank_distribution_monomial(2, 4, 2)  # l < m/2 violated


def test_rank_distribution_monomial_exhaustive_oracle():
    ctx = gf.get_field(2, 4)
    tally = {}
    for g in ctx.exp[:15]:
        cls = klapper.classify_monomial(ctx, 1, 4, int(g), 1)
        key = (cls.rank, cls.type)
        tally[key] = tally.get(key, 0) + 1
    assert tally == klapper.rank_distribution_monomial(2, 4, 1).as_dict()


def test_l3l_constants():
    fs = klapper.l3l_constants(3, 8, 1)
    assert sum(fs) == 3 ** 16 - 1
    assert all(f >= 0 for f in fs)
    # frozen from the exhaustive radical sweep over all 3^16 pairs
    assert fs == (31084560, 11512800, 447720, 1640)
    dist = klapper.rank_distribution_l3l(3, 8, 1)
    assert dist.as_dict() == {(8, 1): fs[0], (6, -1): fs[1], (4, 1): fs[2], (2, -1): fs[3]}


def test_l3l_errors():
    with pytest.raises(HypothesisError):
        klapper.l3l_constants(2, 8, 1)
    with pytest.raises(HypothesisError):
        klapper.l3l_constants(3, 6, 1)  # m > 6l violated
    with pytest.raises(HypothesisError):
        klapper.l3l_constants(3, 7, 1)  # m_l odd


def test_pair_sweep_small_field_vs_scalar():
    # the sweep machinery works on any odd-p field with even m; cross-check
    # every pair against the general radical route on F_81
    ctx = gf.get_field(3, 4)
    tally, counts = klapper.tally_l3l_ranks(ctx, 1, return_counts=True)
    assert sum(tally.values()) == 3 ** 8
    rng = np.random.default_rng(9)
    for _ in range(60):
        g1, g2 = int(rng.integers(0, 81)), int(rng.integers(0, 81))
        prof = klapper.l3l_pair_profile(ctx, 1, g1, g2)
        nullity = round(np.log(counts[g1 + 81 * g2] + 1) / np.log(3))
        assert 4 - nullity == prof.rank


def test_pair_sweep_workers_match():
    ctx = gf.get_field(3, 4)
    assert klapper.tally_l3l_ranks(ctx, 1, workers=1) == \
        klapper.tally_l3l_ranks(ctx, 1, workers=2)


def test_fast_profile_matches_general():
    ctx = gf.get_field(3, 4)
    rng = np.random.default_rng(13)
    for _ in range(40):
        g1, g2 = int(rng.integers(0, 81)), int(rng.integers(0, 81))
        if (g1, g2) == (0, 0):
            continue
        fast = klapper.l3l_pair_profile_fast(ctx, 1, g1, g2)
        full = klapper.l3l_pair_profile(ctx, 1, g1, g2)
        assert (fast.rank, fast.type) == (full.rank, full.type)


def test_eps_ell():
    assert klapper.eps_ell(8, 1) == 1    # m_l = 8, half even
    assert klapper.eps_ell(6, 1) == -1   # m_l = 6, half odd
    assert klapper.eps_ell(4, 2) == -1   # m_l = 2, half odd
    with pytest.raises(HypothesisError):
        klapper.eps_ell(5, 1)
