import numpy as np
import pytest

from qfcodes import gf, quadform
from qfcodes.linpoly import LinearizedPoly
from qfcodes.quadform import QuadForm, RankError


def form(p, s, m, exps, coeffs):
    return QuadForm(gf.get_field(p, s * m), s, m, LinearizedPoly(exps, coeffs, s))


def test_zero_form():
    Q = form(2, 1, 4, (1,), (0,))
    assert quadform.rank(Q) == 0
    assert len(quadform.radical(Q)) == 4  # the radical is the whole field


def test_f16_cubic_form():
    # Q(x) = tr_{16/2}(x^3): rank 2, type -1
    Q = form(2, 1, 4, (1,), (1,))
    V = quadform.radical(Q)
    assert len(V) == 2
    assert quadform.rank(Q) == 2
    assert quadform.type_of(Q, 2) == -1
    # radical really is invariant: Q(v)=0 and Q(x+v)=Q(x)
    ctx = Q.ctx
    span = set()
    for c1 in range(2):
        for c2 in range(2):
            v = 0
            if c1:
                v = ctx.add(v, V[0])
            if c2:
                v = ctx.add(v, V[1])
            span.add(v)
    assert len(span) == 4  # |V| = q^{m-r} = 4
    for v in span:
        assert Q.value_sym(v) == 0
        for x in range(16):
            assert Q.value_sym(ctx.add(x, v)) == Q.value_sym(x)


def test_f16_noncube_form():
    ctx = gf.get_field(2, 4)
    Q = form(2, 1, 4, (1,), (ctx.alpha,))
    assert quadform.rank(Q) == 4
    assert quadform.type_of(Q, 4) == 1


def test_count_and_sum_values():
    Q = form(2, 1, 4, (1,), (1,))
    assert quadform.count_N(Q, 0, 0) == 4  # 2^3 - 1*1*2^2
    assert quadform.exp_sum(Q, 0, 0) == -8
    # sum over xi of N equals q^m
    ctx = Q.ctx
    sy = ctx.symbols(1)
    total = sum(quadform.count_N(Q, 5, int(sy.elements[t])) for t in range(2))
    assert total == 16


def test_exp_sum_distribution_example():
    Q = form(2, 1, 4, (1,), (1,))
    dist = quadform.exp_sum_distribution(Q, 0)
    assert dist == {0: 12, -8: 1, 8: 3}


def test_full_rank_no_zero_sum():
    ctx = gf.get_field(2, 4)
    Q = form(2, 1, 4, (1,), (ctx.alpha,))
    dist = quadform.exp_sum_distribution(Q, 0)
    assert 0 not in dist  # q^m - q^r = 0 at full rank


@pytest.mark.parametrize("p,s,m,ell", [(2, 1, 4, 1), (3, 1, 4, 1), (2, 2, 4, 1), (5, 1, 4, 1)])
def test_sum_distribution_verification(p, s, m, ell):
    ctx = gf.get_field(p, s * m)
    seen_branches = set()
    for g in ctx.exp[: ctx.mult_order]:
        from qfcodes.klapper import classify_monomial
        cls = classify_monomial(ctx, s, m, int(g), ell)
        if cls.branch in seen_branches:
            continue
        seen_branches.add(cls.branch)
        Q = form(p, s, m, (ell,), (int(g),))
        rep = quadform.verify_sum_distribution(Q)
        assert rep.ok, rep.mismatches


def test_count_distributions_odd_char():
    Q = form(3, 1, 4, (1,), (1,))
    r = quadform.rank(Q)
    eps = quadform.type_of(Q, r)
    ctx = Q.ctx
    sy = ctx.symbols(1)
    for xi_sym in range(3):
        obs = quadform.n_distribution(Q, xi_sym)
        exp = quadform.expected_count_distribution(3, 4, r, eps, xi_is_zero=(xi_sym == 0))
        assert obs == exp


def test_type_routes_agree_everywhere_f81():
    ctx = gf.get_field(3, 4)
    for g in ctx.exp[: ctx.mult_order]:
        Q = form(3, 1, 4, (1,), (int(g),))
        r = quadform.rank(Q)
        assert quadform.type_by_count(Q, r) == quadform.type_by_discriminant(Q, r)


def test_odd_rank_rejected():
    # tr_{2^4/2}(x * x) = tr(x^2) has rank 1 (it is a linear functional squared)
    Q = form(2, 1, 4, (0,), (1,))
    r = quadform.rank(Q)
    assert r % 2 == 1
    with pytest.raises(RankError):
        quadform.type_of(Q, r)
    with pytest.raises(RankError):
        quadform.verify_sum_distribution(Q)


def test_rank0_type_rejected():
    Q = form(2, 1, 4, (1,), (0,))
    with pytest.raises(RankError):
        quadform.type_of(Q, 0)


def test_beta_class_counts_rank0():
    # zero form: only the "major" class with the single beta = 0
    counts = quadform.beta_class_counts(3, 2, 0, 1, b_zero=True)
    assert counts == {"null": 8, "major": 1, "minor": 0}


def test_exp_sum_identity_random():
    ctx = gf.get_field(3, 4)
    Q = form(3, 1, 4, (1,), (ctx.alpha,))
    sy = ctx.symbols(1)
    rng = np.random.default_rng(2)
    for _ in range(10):
        beta = int(rng.integers(0, 81))
        b_sym = int(rng.integers(0, 3))
        b = int(sy.elements[b_sym])
        s = quadform.exp_sum(Q, b, beta)
        assert s == 3 * quadform.count_N(Q, beta, ctx.neg(b)) - 81
