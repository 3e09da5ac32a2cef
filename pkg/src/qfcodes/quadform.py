"""Quadratic trace forms Q_R(x) = tr_{q^m/q}(x R(x)): rank, type, counts, sums.

The bilinear form B(x,y) = Q(x+y) - Q(x) - Q(y) equals tr_{q^m/q}(x E(y))
with E = R + R^adj, so the radical is computed from the Gram matrix of B in
the F_q-basis {1, alpha, .., alpha^{m-1}}.  In characteristic 2 the radical
additionally requires Q(y) = 0 inside ker B.  Exponential sums are integers
(S_{Q,b}(beta) = q N_{Q,beta}(-b) - q^m); no complex arithmetic appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gf import FieldCtx, FieldError
from .linpoly import LinearizedPoly, lin_eval, lin_eval_table

BETA_CLASSES = ("null", "major", "minor")


class RankError(ValueError):
    pass


@dataclass(frozen=True)
class QuadFormProfile:
    rank: int
    type: int | None  # +1 / -1, None when rank 0 (type suppressed)


class QuadForm:
    """Q_R over F_q in m variables, with table-backed evaluation."""

    def __init__(self, ctx: FieldCtx, s: int, m: int, R: LinearizedPoly):
        if ctx.n != s * m:
            raise FieldError("field degree must equal s*m")
        self.ctx = ctx
        self.s = s
        self.m = m
        self.q = ctx.p ** s
        self.R = R
        self._syms: np.ndarray | None = None
        self._gram: list[list[int]] | None = None

    def value_sym(self, x: int) -> int:
        """Q(x) as a canonical F_q symbol."""
        ctx = self.ctx
        return int(ctx.symbols(self.s).trace_sym[ctx.mul(x, lin_eval(ctx, self.R, x))])

    def value_elem(self, x: int) -> int:
        ctx = self.ctx
        return ctx.trace(ctx.mul(x, lin_eval(ctx, self.R, x)), self.s)

    def sym_table(self) -> np.ndarray:
        """Q over every field element, as symbols (cached)."""
        if self._syms is None:
            ctx = self.ctx
            xs = np.arange(ctx.order, dtype=np.int64)
            self._syms = ctx.symbols(self.s).trace_sym[ctx.v_mul(xs, lin_eval_table(ctx, self.R))]
        return self._syms

    def gram(self) -> list[list[int]]:
        """Gram matrix of B(x,y) = Q(x+y)-Q(x)-Q(y) over F_q (entries: field indices)."""
        if self._gram is None:
            ctx = self.ctx
            bas = [ctx.alpha_pow(i) for i in range(self.m)]
            qv = [self.value_elem(b) for b in bas]
            G = [[0] * self.m for _ in range(self.m)]
            for i in range(self.m):
                for j in range(i, self.m):
                    v = self.value_elem(ctx.add(bas[i], bas[j]))
                    v = ctx.sub(ctx.sub(v, qv[i]), qv[j])
                    G[i][j] = G[j][i] = v
            self._gram = G
        return self._gram


# -- dense linear algebra over F_q (entries are field element indices) -------

def _kernel_basis_fq(ctx: FieldCtx, rows: list[list[int]]) -> list[list[int]]:
    """Kernel of a matrix over F_q by RREF; vectors as lists of field indices."""
    mat = [row[:] for row in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = ctx.inv(mat[r][c])
        mat[r] = [ctx.mul(inv, v) for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for rr, pc in enumerate(pivots):
            vec[pc] = ctx.neg(mat[rr][fc])
        basis.append(vec)
    return basis


def radical(Q: QuadForm) -> list[int]:
    """F_q-basis of V = {y : Q(y)=0 and Q(x+y)=Q(x) for all x}, as field elements."""
    ctx = Q.ctx
    bas = [ctx.alpha_pow(i) for i in range(Q.m)]
    kern = _kernel_basis_fq(ctx, Q.gram())

    def combine(vec: list[int]) -> int:
        acc = 0
        for c, b in zip(vec, bas):
            acc = ctx.add(acc, ctx.mul(c, b))
        return acc

    w_basis = [combine(v) for v in kern]
    if ctx.p != 2:
        return w_basis
    # char 2: keep the subspace of ker B where Q vanishes.  Q is additive on
    # ker B and Q(c y) = c^2 Q(y), so with mu_i = c_i^2 the condition
    # Q(sum c_i w_i) = 0 becomes the linear system sum mu_i Q(w_i) = 0.
    qvals = [Q.value_elem(w) for w in w_basis]
    if all(v == 0 for v in qvals):
        return w_basis
    mu_kernel = _kernel_basis_fq(ctx, [qvals])
    half = Q.q // 2  # sqrt in F_q (char 2): u -> u^{q/2}
    out = []
    for mu in mu_kernel:
        y = 0
        for mu_i, w in zip(mu, w_basis):
            y = ctx.add(y, ctx.mul(ctx.pow(mu_i, half), w))
        out.append(y)
    return out


def rank(Q: QuadForm) -> int:
    return Q.m - len(radical(Q))


def _count_zeros(Q: QuadForm) -> int:
    return int(np.count_nonzero(Q.sym_table() == 0))


def type_by_count(Q: QuadForm, r: int) -> int:
    """Solve N_Q(0) = q^{m-1} + eps (q-1) q^{m-r/2-1} for eps by exhaustive count."""
    q, m = Q.q, Q.m
    n0 = _count_zeros(Q)
    dev = Fraction(q - 1) * Fraction(q) ** (m - r // 2 - 1)
    base = Fraction(q) ** (m - 1)
    if n0 == base + dev:
        return 1
    if n0 == base - dev:
        return -1
    raise RankError(f"zero count {n0} matches neither type at rank {r}")


def type_by_discriminant(Q: QuadForm, r: int) -> int:
    """Odd characteristic: eps = eta((-1)^{r/2} * det of the nondegenerate block)."""
    ctx = Q.ctx
    if ctx.p == 2:
        raise RankError("discriminant route needs odd characteristic")
    m = Q.m
    A = [row[:] for row in Q.gram()]
    det = 1
    got = 0
    for k in range(m):
        piv = next((i for i in range(k, m) if A[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, m) for j in range(i + 1, m) if A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            for c in range(m):
                A[i][c] = ctx.add(A[i][c], A[j][c])
            for rr in range(m):
                A[rr][i] = ctx.add(A[rr][i], A[rr][j])
            piv = i
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            for rr in range(m):
                A[rr][k], A[rr][piv] = A[rr][piv], A[rr][k]
        pv = A[k][k]
        det = ctx.mul(det, pv)
        got += 1
        inv = ctx.inv(pv)
        for i in range(k + 1, m):
            if A[i][k] != 0:
                f = ctx.mul(A[i][k], inv)
                for c in range(m):
                    A[i][c] = ctx.sub(A[i][c], ctx.mul(f, A[k][c]))
                for rr in range(m):
                    A[rr][i] = ctx.sub(A[rr][i], ctx.mul(f, A[rr][k]))
    if got != r:
        raise RankError(f"bilinear rank {got} disagrees with quadratic rank {r}")
    sign = 1 if (r // 2) % 2 == 0 else ctx.neg(1)
    u = ctx.mul(sign, det)
    eta = ctx.pow(u, (Q.q - 1) // 2)
    if eta == 1:
        return 1
    if eta == ctx.neg(1):
        return -1
    raise RankError("quadratic character did not evaluate to +-1")


def type_of(Q: QuadForm, r: int, count_limit: int = 1 << 16) -> int:
    """Type of an even-rank form; counting route, cross-checked by discriminant."""
    if r % 2 != 0:
        raise RankError(f"type is defined for even rank only, got {r}")
    if r == 0:
        raise RankError("rank 0: the zero form carries no type flag")
    if Q.ctx.order <= count_limit:
        eps = type_by_count(Q, r)
        if Q.ctx.p != 2:
            alt = type_by_discriminant(Q, r)
            if alt != eps:
                raise RankError("discriminant route disagrees with counting route")
        return eps
    if Q.ctx.p == 2:
        raise RankError("field too large for the characteristic-2 counting route")
    return type_by_discriminant(Q, r)


def profile(Q: QuadForm) -> QuadFormProfile:
    r = rank(Q)
    return QuadFormProfile(rank=r, type=None if r == 0 else type_of(Q, r))


# -- solution counts and exponential sums -------------------------------------

def count_N(Q: QuadForm, beta: int, xi: int) -> int:
    """#{x : Q(x) + tr(beta x) = xi}; xi given as an F_q element of the field."""
    ctx = Q.ctx
    sy = ctx.symbols(Q.s)
    xi_sym = sy.sym(xi)
    xs = np.arange(ctx.order, dtype=np.int64)
    tr_b = sy.trace_sym[ctx.v_mul(np.full(ctx.order, beta, dtype=np.int64), xs)]
    vals = sy.add[Q.sym_table(), tr_b]
    return int(np.count_nonzero(vals == xi_sym))


def exp_sum(Q: QuadForm, b: int, beta: int) -> int:
    """S_{Q,b}(beta) = q N_{Q,beta}(-b) - q^m, always an integer."""
    ctx = Q.ctx
    return Q.q * count_N(Q, beta, ctx.neg(b)) - ctx.order


def _sym_matrix(Q: QuadForm, betas: np.ndarray) -> np.ndarray:
    """Symbols of Q(x) + tr(beta x) on the (beta, x) grid."""
    ctx = Q.ctx
    sy = ctx.symbols(Q.s)
    xs = np.arange(ctx.order, dtype=np.int64)
    prod = ctx.v_mul(betas[:, None], xs[None, :])
    return sy.add[Q.sym_table()[None, :], sy.trace_sym[prod]]


def n_distribution(Q: QuadForm, xi_sym: int) -> dict[int, int]:
    """Value -> frequency of N_{Q,beta}(xi) over all beta, for one xi symbol."""
    ctx = Q.ctx
    out: dict[int, int] = {}
    betas = np.arange(ctx.order, dtype=np.int64)
    for lo in range(0, ctx.order, 2048):
        chunk = betas[lo: lo + 2048]
        counts = np.count_nonzero(_sym_matrix(Q, chunk) == xi_sym, axis=1)
        for c in counts:
            out[int(c)] = out.get(int(c), 0) + 1
    return out


def exp_sum_distribution(Q: QuadForm, b_sym: int) -> dict[int, int]:
    """Value -> frequency of S_{Q,b}(beta) over all beta, for one fixed b."""
    ctx = Q.ctx
    q = Q.q
    target = int(ctx.symbols(Q.s).neg[b_sym])
    return {q * c - ctx.order: cnt for c, cnt in n_distribution(Q, target).items()}


# -- closed-form beta-sweep distributions --------------------------------------

def _merge(rows: list[tuple[Fraction, Fraction]]) -> dict[int, int]:
    acc: dict[Fraction, Fraction] = {}
    for value, count in rows:
        acc[value] = acc.get(value, Fraction(0)) + count
    out: dict[int, int] = {}
    for value, count in acc.items():
        if count == 0:
            continue
        if value.denominator != 1 or count.denominator != 1 or count < 0:
            raise RankError(f"non-integral row ({value}, {count}): parameters outside hypotheses")
        out[int(value)] = int(count)
    return out


def _require_even_rank(r: int):
    if r < 0 or r % 2 != 0:
        raise RankError(f"even nonnegative rank required, got {r}")


def beta_class_counts(q: int, m: int, r: int, eps: int, b_zero: bool) -> dict[str, int]:
    """How many beta fall in each exponential-sum class, for fixed b (=0 or !=0).

    Evaluated as exact rationals so the degenerate r = 0 instance (zero form,
    eps treated as +1) comes out right.
    """
    _require_even_rank(r)
    qq = Fraction(q)
    rows = {
        "null": qq ** m - qq ** r,
        "major": (qq ** (r - 1) + eps * (qq - 1) * qq ** (Fraction(r, 2) - 1)) if b_zero
        else (qq ** (r - 1) - eps * qq ** (Fraction(r, 2) - 1)),
        "minor": ((qq ** (r - 1) - eps * qq ** (Fraction(r, 2) - 1)) * (qq - 1)) if b_zero
        else (qq ** r - qq ** (r - 1) + eps * qq ** (Fraction(r, 2) - 1)),
    }
    out: dict[str, int] = {}
    for name, cnt in rows.items():
        if cnt.denominator != 1 or cnt < 0:
            raise RankError(f"non-integral class count for r={r}")
        out[name] = int(cnt)
    return out


def exp_sum_class_value(q: int, m: int, r: int, eps: int, beta_class: str) -> int:
    """The S_{Q,b} value attached to a beta class (independent of b)."""
    _require_even_rank(r)
    if beta_class == "null":
        return 0
    dev = Fraction(q) ** (m - Fraction(r, 2))
    if beta_class == "major":
        return int(eps * (q - 1) * dev)
    if beta_class == "minor":
        return int(-eps * dev)
    raise ValueError(f"unknown beta class {beta_class!r}")


def expected_sum_distribution(q: int, m: int, r: int, eps: int, b_zero: bool) -> dict[int, int]:
    """Closed-form S-value -> frequency table for one b."""
    counts = beta_class_counts(q, m, r, eps, b_zero)
    rows = [(Fraction(exp_sum_class_value(q, m, r, eps, cls)), Fraction(counts[cls]))
            for cls in BETA_CLASSES]
    return _merge(rows)


def expected_count_distribution(q: int, m: int, r: int, eps: int, xi_is_zero: bool) -> dict[int, int]:
    """Closed-form N_{Q,beta}(xi) value -> frequency over beta, for one xi.

    The c-classes below enumerate F_q by whether c = 0 and whether xi + c = 0:
    value = q^{m-1} + eps nu(xi+c) q^{m-r/2-1} occurs for
    q^{r-1} + eps nu(c) q^{r/2-1} betas, plus the flat q^{m-1} row.
    nu(0) = q-1 and nu(z) = -1 for z != 0 (the counts sum to q^m only with
    this convention, and direct enumeration confirms it).
    """
    _require_even_rank(r)
    qq = Fraction(q)
    big = qq ** (m - Fraction(r, 2) - 1)
    small = qq ** (Fraction(r, 2) - 1)
    if xi_is_zero:
        classes = [(qq - 1, qq - 1, 1), (-1, -1, q - 1)]
    else:
        classes = [(qq - 1, -1, 1), (-1, qq - 1, 1), (-1, -1, q - 2)]
    rows = [(qq ** (m - 1), qq ** m - qq ** r)]
    for nu_c, nu_shift, mult in classes:
        rows.append((qq ** (m - 1) + eps * nu_shift * big,
                     (qq ** (r - 1) + eps * nu_c * small) * mult))
    return _merge(rows)


@dataclass
class SumDistributionReport:
    ok: bool
    rank: int
    type: int
    mismatches: list[str]


def verify_sum_distribution(Q: QuadForm) -> SumDistributionReport:
    """Sweep all beta for b = 0 and each b != 0 and compare with the closed forms."""
    r = rank(Q)
    if r % 2 != 0:
        raise RankError("the sum-distribution check needs even rank")
    eps = 1 if r == 0 else type_of(Q, r)
    q, m = Q.q, Q.m
    mismatches = []
    for b_sym in range(q):
        observed = exp_sum_distribution(Q, b_sym)
        expected = expected_sum_distribution(q, m, r, eps, b_zero=(b_sym == 0))
        if observed != expected:
            mismatches.append(f"b_sym={b_sym}: observed {sorted(observed.items())}, "
                              f"expected {sorted(expected.items())}")
    return SumDistributionReport(ok=not mismatches, rank=r, type=eps, mismatches=mismatches)
