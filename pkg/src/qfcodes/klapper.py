"""Closed-form rank/type data for Q_{gamma,l}(x) = tr_{q^m/q}(gamma x^{q^l+1}).

Classification branches on exponentiation tests only: gamma^{(q^m-1)/L} with
L = q^{(m,l)}+1 equals 1 exactly on the t = 0 (mod L) power class and -1 on
the t = L/2 class, so no discrete logarithm is ever computed.  The module
also carries the rank-multiplicity constants for the one- and two-monomial
families, and an exhaustive rank tally over all (gamma_1, gamma_2) pairs
used to verify the two-monomial constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .gf import FieldCtx, FieldError, is_prime
from .linpoly import LinearizedPoly
from .quadform import QuadForm, QuadFormProfile, profile as qf_profile


class HypothesisError(ValueError):
    """Raised when parameters fall outside a result's hypotheses."""


def _check_m_ell_even(m: int, ell: int):
    if ell < 1:
        raise HypothesisError("l must be >= 1")
    if (m // gcd(m, ell)) % 2 != 0:
        raise HypothesisError(f"m/(m,l) must be even, got m={m}, l={ell}")


def eps_ell(m: int, ell: int) -> int:
    """(-1)^{m_l/2} with m_l = m/(m,l); defined only for even m_l."""
    _check_m_ell_even(m, ell)
    return -1 if ((m // gcd(m, ell)) // 2) % 2 else 1


def gcd_identity(q: int, m: int, ell: int) -> bool:
    """gcd(q^m-1, q^l+1) == q^{(m,l)}+1, valid whenever m/(m,l) is even."""
    _check_m_ell_even(m, ell)
    return gcd(q ** m - 1, q ** ell + 1) == q ** gcd(m, ell) + 1


@dataclass(frozen=True)
class MonomialClassification:
    gamma: int
    ell: int
    rank: int
    type: int | None        # suppressed for the degenerate rank-0 class
    branch: str             # which power class fired

    def profile(self) -> QuadFormProfile:
        return QuadFormProfile(rank=self.rank, type=self.type)


def classify_monomial(ctx: FieldCtx, s: int, m: int, gamma: int, ell: int) -> MonomialClassification:
    """Rank and type of tr_{q^m/q}(gamma x^{q^l+1}) by the power-class tests."""
    if gamma == 0:
        raise HypothesisError("gamma must be nonzero")
    if ctx.n != s * m:
        raise FieldError("field degree must equal s*m")
    _check_m_ell_even(m, ell)
    q = ctx.p ** s
    delta = gcd(m, ell)
    L = q ** delta + 1
    N = ctx.mult_order
    if N % L != 0:
        raise HypothesisError("q^{(m,l)}+1 must divide q^m-1")
    pr = ctx.pow(gamma, N // L)
    e = eps_ell(m, ell)
    if ctx.p == 2:
        special = pr == 1
        branch = "residue" if special else "nonresidue"
    elif e == 1:
        special = pr == 1
        branch = "t0" if special else "generic"
    else:
        special = pr == ctx.neg(1)
        branch = "thalf" if special else "generic"
    if special:
        r = m - 2 * delta
        return MonomialClassification(gamma, ell, r, None if r == 0 else -e, branch)
    return MonomialClassification(gamma, ell, m, e, branch)


def m_counts(q: int, m: int, ell: int) -> tuple[int, int]:
    """(M, M') = (#powers / #power-class members, complement size)."""
    _check_m_ell_even(m, ell)
    L = q ** gcd(m, ell) + 1
    if (q ** m - 1) % L != 0:
        raise HypothesisError("q^{(m,l)}+1 must divide q^m-1")
    M = (q ** m - 1) // L
    return M, q ** gcd(m, ell) * M


@dataclass(frozen=True)
class RankDistribution:
    """M_{r,eps} multiplicities of nonzero forms in a family (R = 0 implicit)."""

    q: int
    m: int
    counts: tuple[tuple[int, int, int], ...]  # (rank, eps, count), rank descending

    def total(self) -> int:
        return sum(c for _, _, c in self.counts)

    def ranks(self) -> list[int]:
        return sorted({r for r, _, _ in self.counts}, reverse=True)

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {(r, e): c for r, e, c in self.counts}


def rank_distribution_monomial(q: int, m: int, ell: int) -> RankDistribution:
    """Two-rank distribution of <x^{q^l}>: n q^{(m,l)} forms of rank m, n of rank m-2(m,l)."""
    _check_m_ell_even(m, ell)
    if 2 * ell >= m:
        raise HypothesisError("l < m/2 is required")
    delta = gcd(m, ell)
    n, n_comp = m_counts(q, m, ell)
    e = eps_ell(m, ell)
    return RankDistribution(q=q, m=m, counts=((m, e, n_comp), (m - 2 * delta, -e, n)))


def l3l_constants(p: int, m: int, ell: int) -> tuple[int, int, int, int]:
    """The four rank multiplicities (ranks m, m-2d, m-4d, m-6d) of <x^{p^l}, x^{p^{3l}}>."""
    if not is_prime(p) or p == 2:
        raise HypothesisError("p must be an odd prime")
    _check_m_ell_even(m, ell)
    if m <= 6 * ell:
        raise HypothesisError("m > 6l is required")
    d = gcd(m, ell)
    e = eps_ell(m, ell)
    P = Fraction(p)
    denom = P ** (6 * d) + P ** (5 * d) - P ** (4 * d) + P ** (2 * d) - P ** d - 1
    half, threehalf = Fraction(m, 2), Fraction(3 * m, 2)
    alt = sum((-1) ** (i + 1) * P ** (i * d) for i in range(6))
    f0 = (P ** (2 * m + 6 * d) - P ** (2 * m + 4 * d) - P ** (2 * m + d)
          + P ** (m + 4 * d) + P ** (m + d) - P ** (6 * d)
          + e * (P ** (threehalf + 5 * d) - P ** (threehalf + 4 * d)
                 - P ** (half + 5 * d) + P ** (half + 4 * d))) / denom
    f1 = (P ** (2 * m - 2 * d) * (P ** (7 * d) - P ** (2 * d) - 1)
          + P ** (m - 2 * d) * (P ** (5 * d) - P ** (6 * d) + P ** (2 * d) + 1)
          - P ** (3 * d) * (P ** (2 * d) - P ** d + 1)
          - e * (P ** threehalf - P ** half) * alt) / denom
    f2 = (P ** (2 * m - 3 * d) * (P ** (5 * d) + P ** d - 1)
          - P ** (m - 3 * d) * (P ** (6 * d) + P ** (4 * d) + P ** d - 1)
          + P ** d * (P ** (2 * d) - P ** d + 1)
          + e * (P ** (threehalf - 2 * d) - P ** (half - 2 * d)) * alt) / denom
    f3 = (P ** (2 * m - 3 * d) - P ** m - P ** (m - 3 * d) + 1
          - e * (P ** (threehalf - d) - P ** (threehalf - 2 * d)
                 - P ** (half - d) + P ** (half - 2 * d))) / denom
    out = []
    for j, f in enumerate((f0, f1, f2, f3)):
        if f.denominator != 1 or f < 0:
            raise HypothesisError(f"rank multiplicity {j} is not a nonnegative integer: {f}")
        out.append(int(f))
    if sum(out) != p ** (2 * m) - 1:
        raise HypothesisError("rank multiplicities do not sum to p^{2m} - 1")
    return tuple(out)


def rank_distribution_l3l(p: int, m: int, ell: int) -> RankDistribution:
    """Distribution over ranks m-2jd, type (-1)^j eps_l, j = 0..3."""
    fs = l3l_constants(p, m, ell)
    d = gcd(m, ell)
    e = eps_ell(m, ell)
    counts = tuple((m - 2 * j * d, (-1) ** j * e, fs[j]) for j in range(4))
    return RankDistribution(q=p, m=m, counts=counts)


# -- exhaustive verification sweep for the two-monomial family ----------------

def l3l_poly(ctx: FieldCtx, ell: int, g1: int, g2: int) -> LinearizedPoly:
    """R(x) = g1 x^{p^{3l}} + g2 x^{p^l} over F_{p^m} (prime base field)."""
    return LinearizedPoly(q_exponents=(ell, 3 * ell), coeffs=(g2, g1), base_q_degree=1)


def l3l_pair_profile(ctx: FieldCtx, ell: int, g1: int, g2: int) -> QuadFormProfile:
    return qf_profile(QuadForm(ctx, 1, ctx.n, l3l_poly(ctx, ell, g1, g2)))


def _sym_diag_mod_p(G: list[list[int]], p: int) -> tuple[int, int]:
    """(rank, product of diagonal pivots) of a symmetric matrix over F_p, p odd."""
    A = [row[:] for row in G]
    m = len(A)
    rank, det = 0, 1
    for k in range(m):
        piv = next((i for i in range(k, m) if A[i][i] % p), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, m) for j in range(i + 1, m)
                         if A[i][j] % p), None)
            if pair is None:
                break
            i, j = pair
            for c in range(m):
                A[i][c] = (A[i][c] + A[j][c]) % p
            for r in range(m):
                A[r][i] = (A[r][i] + A[r][j]) % p
            piv = i
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            for r in range(m):
                A[r][k], A[r][piv] = A[r][piv], A[r][k]
        pv = A[k][k] % p
        det = (det * pv) % p
        rank += 1
        inv = pow(pv, -1, p)
        for i in range(k + 1, m):
            if A[i][k] % p:
                f = (A[i][k] * inv) % p
                for c in range(m):
                    A[i][c] = (A[i][c] - f * A[k][c]) % p
                for r in range(m):
                    A[r][i] = (A[r][i] - f * A[r][k]) % p
    return rank, det


def l3l_pair_profile_fast(ctx: FieldCtx, ell: int, g1: int, g2: int) -> QuadFormProfile:
    """Profile via plain mod-p arithmetic on the trace Gram matrix (s = 1 only).

    A sweep accelerator; tested to agree with the general quadform route.
    """
    p, m = ctx.p, ctx.n
    if p == 2:
        raise HypothesisError("fast profile targets odd characteristic")
    ts = ctx.symbols(1).trace_sym
    cols = []
    for j in range(m):
        t = int(ctx.pvec[j])
        e = ctx.add(
            ctx.add(ctx.mul(g1, ctx.frob(t, 3 * ell)), ctx.frob(ctx.mul(g1, t), m - 3 * ell)),
            ctx.add(ctx.mul(g2, ctx.frob(t, ell)), ctx.frob(ctx.mul(g2, t), m - ell)))
        cols.append(e)
    G = [[int(ts[ctx.mul(int(ctx.pvec[i]), cols[j])]) for j in range(m)] for i in range(m)]
    rank, det = _sym_diag_mod_p(G, p)
    if rank == 0:
        return QuadFormProfile(rank=0, type=None)
    if rank % 2 != 0:
        raise HypothesisError(f"odd bilinear rank {rank} in the pair family")
    u = ((-1) ** (rank // 2) * det) % p
    eps = 1 if pow(u, (p - 1) // 2, p) == 1 else -1
    return QuadFormProfile(rank=rank, type=eps)


def _kernel_mod_p(rows: list[list[int]], p: int) -> list[list[int]]:
    """Kernel basis of a matrix over the prime field F_p."""
    mat = [r[:] for r in rows]
    nrows, ncols = len(mat), len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if mat[i][c] % p), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, p)
        mat[r] = [(v * inv) % p for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c] % p:
                f = mat[i][c]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    basis = []
    for fc in (c for c in range(ncols) if c not in pivots):
        vec = [0] * ncols
        vec[fc] = 1
        for rr, pc in enumerate(pivots):
            vec[pc] = (-mat[rr][fc]) % p
        basis.append(vec)
    return basis


def _pair_counts_for_ys(ctx: FieldCtx, ell: int, ys: np.ndarray) -> np.ndarray:
    """For each y in ys, bump every (g1,g2) pair whose radical contains y.

    The radical condition E_{g1,g2}(y) = 0 with
    E(y) = g1 y^{p^{3l}} + (g1 y)^{p^{m-3l}} + g2 y^{p^l} + (g2 y)^{p^{m-l}}
    is F_p-linear in (g1, g2), so the qualifying pairs form a subspace per y;
    enumerating those subspaces tallies |radical|-1 for all p^{2m} pairs at once.
    """
    p, m = ctx.p, ctx.n
    counts = np.zeros(p ** (2 * m), dtype=np.int16)
    pair_pows = p ** np.arange(2 * m, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    # columns of the m x 2m condition matrix, vectorized over all y at once
    a = ctx.frob_table(3 * ell)[ys]
    b = ctx.frob_table(ell)[ys]
    f3 = ctx.frob_table(m - 3 * ell)
    f1 = ctx.frob_table(m - ell)
    cols = np.empty((len(ys), m, 2 * m), dtype=np.int8)
    for j in range(m):
        tj = np.full(len(ys), int(ctx.pvec[j]), dtype=np.int64)
        cols[:, :, j] = ctx._digmat[ctx.v_add(ctx.v_mul(tj, a), f3[ctx.v_mul(tj, ys)])]
        cols[:, :, m + j] = ctx._digmat[ctx.v_add(ctx.v_mul(tj, b), f1[ctx.v_mul(tj, ys)])]
    # one matmul per y enumerates its whole qualifying subspace: rows of the
    # cached coefficient matrix are all p^k coefficient vectors.  float32 GEMM
    # is exact here (entries stay far below 2^24) and much faster than int.
    coeff_cache: dict[int, np.ndarray] = {}

    def coeff_matrix(k: int) -> np.ndarray:
        mat = coeff_cache.get(k)
        if mat is None:
            if p ** k > 20_000_000:
                raise HypothesisError(f"kernel dimension {k} out of expected range")
            idx = np.arange(p ** k, dtype=np.int64)[:, None]
            mat = ((idx // p ** np.arange(k, dtype=np.int64)) % p).astype(np.float32)
            coeff_cache[k] = mat
        return mat

    pending: list[np.ndarray] = []
    pending_len = 0

    def flush():
        nonlocal pending, pending_len
        if not pending:
            return
        codes = np.concatenate(pending)
        np.add(counts, np.bincount(codes, minlength=counts.size),
               out=counts, casting="unsafe")
        pending = []
        pending_len = 0

    for i in range(len(ys)):
        basis = _kernel_mod_p(cols[i].tolist(), p)
        k = len(basis)
        bmat = np.array(basis, dtype=np.float32).reshape(k, 2 * m)
        arr = (coeff_matrix(k) @ bmat).astype(np.int16)
        arr %= p
        pending.append(arr.astype(np.int64) @ pair_pows)
        pending_len += arr.shape[0]
        if pending_len >= 3_000_000:
            flush()
    flush()
    return counts


def _sweep_worker(args):
    p, n, ell, lo, hi = args
    from .gf import get_field
    ctx = get_field(p, n)
    ys = ctx.exp[:ctx.mult_order][lo:hi]
    return _pair_counts_for_ys(ctx, ell, ys)


def tally_l3l_ranks(ctx: FieldCtx, ell: int, workers: int = 1,
                    return_counts: bool = False):
    """Exhaustive rank tally over all (g1, g2) in F_{p^m}^2 via radical membership.

    Returns {rank: multiplicity} covering all p^{2m} pairs (the zero pair
    lands at rank 0).  With return_counts=True also returns the per-pair
    |radical|-1 array indexed by g1_idx + g2_idx * p^m.
    """
    p, m = ctx.p, ctx.n
    if p == 2:
        raise HypothesisError("the two-monomial family sweep targets odd p")
    N = ctx.mult_order
    # E_{g1,g2}(c y) = c E_{g1,g2}(y) for c in F_p^*, so one projective
    # representative per scalar class suffices, weighted by p-1.
    n_reps = N // (p - 1)
    if workers > 1:
        from multiprocessing import get_context
        bounds = np.linspace(0, n_reps, workers + 1, dtype=int)
        jobs = [(p, ctx.n, ell, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:]) if lo < hi]
        with get_context("fork").Pool(len(jobs)) as pool:
            parts = pool.map(_sweep_worker, jobs)
        counts = parts[0]
        for part in parts[1:]:
            counts += part
    else:
        counts = _pair_counts_for_ys(ctx, ell, ctx.exp[:n_reps])
    counts *= p - 1
    values, mult = np.unique(counts, return_counts=True)
    tally: dict[int, int] = {}
    for v, c in zip(values.tolist(), mult.tolist()):
        size = v + 1  # |radical| = p^{m - rank}
        nullity = round(np.log(size) / np.log(p))
        if p ** nullity != size:
            raise HypothesisError(f"radical size {size} is not a power of {p}")
        tally[m - nullity] = tally.get(m - nullity, 0) + c
    if return_counts:
        return tally, counts
    return tally
