"""q-linearized polynomials R(x) = sum a_i x^{q^{l_i}} over F_{q^m}, q = p^s."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .gf import FieldCtx, FieldError


@dataclass(frozen=True)
class FamilySpec:
    """The span <x^{q^{l_1}}, .., x^{q^{l_s}}> over F_{q^m}: exponents plus field shape."""

    p: int
    s: int
    m: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.exponents)) != len(self.exponents):
            raise FieldError("family exponents must be distinct")
        if list(self.exponents) != sorted(self.exponents):
            raise FieldError("family exponents must be sorted ascending")

    @property
    def q(self) -> int:
        return self.p ** self.s

    @property
    def n(self) -> int:
        return self.s * self.m

    def validate_for_tables(self):
        """Hypothesis gate of the spectrum formulas: 1 <= l_1 < .. < l_s < m/2."""
        if any(l < 1 for l in self.exponents):
            raise FieldError("family exponents must be >= 1")
        if any(2 * l >= self.m for l in self.exponents):
            raise FieldError("family exponents must satisfy l < m/2")


@dataclass(frozen=True)
class LinearizedPoly:
    """Coefficients a_i attached to q-exponents l_i; zero coefficients permitted."""

    q_exponents: tuple[int, ...]
    coeffs: tuple[int, ...]
    base_q_degree: int  # s with q = p^s

    def __post_init__(self):
        if len(self.q_exponents) != len(self.coeffs):
            raise FieldError("exponents and coefficients must align")
        if list(self.q_exponents) != sorted(set(self.q_exponents)):
            raise FieldError("q-exponents must be sorted and distinct")

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def degree_exponent(self, p: int) -> int:
        """l_max over nonzero coefficients: deg R = q^{l_max} = p^{s*l_max}."""
        nz = [l for l, c in zip(self.q_exponents, self.coeffs) if c != 0]
        if not nz:
            raise FieldError("zero polynomial has no degree")
        return max(nz)


def lin_eval(ctx: FieldCtx, R: LinearizedPoly, x: int) -> int:
    """R(x) by repeated Frobenius powers; F_q-linear in x."""
    s = R.base_q_degree
    acc = 0
    for l, c in zip(R.q_exponents, R.coeffs):
        if c:
            acc = ctx.add(acc, ctx.mul(c, ctx.frob(x, s * l)))
    return acc


def lin_eval_table(ctx: FieldCtx, R: LinearizedPoly) -> np.ndarray:
    """R over every field element at once."""
    s = R.base_q_degree
    acc = np.zeros(ctx.order, dtype=np.int64)
    for l, c in zip(R.q_exponents, R.coeffs):
        if c:
            term = ctx.v_mul(np.full(ctx.order, c, dtype=np.int64), ctx.frob_table(s * l))
            acc = ctx.v_add(acc, term)
    return acc


def elements_zech_order(ctx: FieldCtx) -> np.ndarray:
    """0 first, then alpha^0, alpha^1, ...: the enumeration order for families."""
    return np.concatenate([[0], ctx.exp[: ctx.mult_order]]).astype(np.int64)


def enumerate_family(ctx: FieldCtx, family: FamilySpec) -> Iterator[LinearizedPoly]:
    """All (q^m)^s coefficient tuples exactly once, lexicographic in Zech order."""
    if ctx.p != family.p or ctx.n != family.n:
        raise FieldError("field context does not match family parameters")
    order = elements_zech_order(ctx)
    exps = family.exponents
    s = family.s

    def rec(prefix: tuple[int, ...]) -> Iterator[LinearizedPoly]:
        if len(prefix) == len(exps):
            yield LinearizedPoly(q_exponents=exps, coeffs=prefix, base_q_degree=s)
            return
        for c in order:
            yield from rec(prefix + (int(c),))

    yield from rec(())
