"""Spectra of the trace-form cyclic codes: table predictions and brute force.

Codes are indexed by coordinates x = alpha^0, alpha^1, .., alpha^{q^m-2}
(shortened variants keep the first (q^m-1)/D coordinates).  Variants:
  "base"  words tr(xR(x))
  "0"     plus a constant b in F_q
  "1"     plus a linear term tr(beta x)
  "2"     plus both
All table rows are generated by one shared routine driven by a rank
distribution, so the single- and two-monomial instantiations cannot drift
from the general tables.  Everything is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
import warnings

import numpy as np

from .gf import FieldCtx, FieldError
from .klapper import (HypothesisError, RankDistribution, eps_ell,
                      rank_distribution_l3l, rank_distribution_monomial)
from .linpoly import FamilySpec, LinearizedPoly
from .quadform import beta_class_counts, exp_sum_class_value

VARIANTS = ("base", "0", "1", "2")
DEFAULT_BUDGET = 1 << 32

_HASH_MULT = np.uint64(0x9E3779B97F4A7C15)


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class CodeSpec:
    family: FamilySpec
    variant: str = "base"
    shortened: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.shortened:
            if len(self.family.exponents) != 1 or self.variant not in ("base", "0"):
                raise ValueError("shortening applies to single-monomial base/0 codes only")


@dataclass(frozen=True)
class Spectrum:
    n: int
    q: int
    weights: dict[int, int]

    def total(self) -> int:
        return sum(self.weights.values())

    def dim(self) -> int:
        total = self.total()
        k = round(np.log(total) / np.log(self.q))
        if self.q ** k != total:
            raise ValueError(f"frequency sum {total} is not a power of {self.q}")
        return k

    def min_distance(self) -> int:
        return min(w for w in self.weights if w > 0)

    def sorted_items(self) -> list[tuple[int, int]]:
        return sorted(self.weights.items())

    def scaled_down(self, D: int) -> "Spectrum":
        if self.n % D != 0:
            raise ValueError("length not divisible")
        out = {}
        for w, a in self.weights.items():
            if w % D != 0:
                raise ValueError(f"weight {w} not divisible by {D}")
            out[w // D] = a
        return Spectrum(n=self.n // D, q=self.q, weights=out)


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    d: int

    def as_list(self) -> list[int]:
        return [self.n, self.k, self.d]


# -- the shared table rows -----------------------------------------------------

def weight_from_profile(q: int, m: int, r: int, eps: int, b_zero: bool,
                        beta_class: str) -> int:
    """Codeword weight for a rank-r type-eps form, given the b and beta case."""
    if r <= 0 or r % 2 != 0:
        raise HypothesisError(f"closed-form weights need positive even rank, got {r}")
    base = q ** m - q ** (m - 1) - (0 if b_zero else 1)
    s_over_q = Fraction(exp_sum_class_value(q, m, r, eps, beta_class), q)
    w = base - s_over_q
    assert w.denominator == 1
    return int(w)


def _add_row(weights: dict[int, int], w: int, count: int):
    if count:
        weights[w] = weights.get(w, 0) + count


def predict_general(q: int, m: int, dist: RankDistribution, variant: str) -> Spectrum:
    """Assemble the spectrum of a full-length variant from a rank distribution.

    Frequencies must total q^{ms(+1)} per the dimension claims; that is
    asserted before returning.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if (q, m) != (dist.q, dist.m):
        raise ValueError("distribution does not match (q, m)")
    for r, _, cnt in dist.counts:
        if cnt and (r <= 0 or r % 2 != 0):
            raise HypothesisError(f"rank {r} outside the even positive range")
    n = q ** m - 1
    weights: dict[int, int] = {0: 1}
    null_total = sum(cnt * (q ** m - q ** r) for r, _, cnt in dist.counts) + (q ** m - 1)

    if variant == "base":
        for r, e, cnt in dist.counts:
            _add_row(weights, weight_from_profile(q, m, r, e, True, "major"), cnt)
    elif variant == "0":
        for r, e, cnt in dist.counts:
            _add_row(weights, weight_from_profile(q, m, r, e, True, "major"), cnt)
            _add_row(weights, weight_from_profile(q, m, r, e, False, "minor"), cnt * (q - 1))
        _add_row(weights, n, q - 1)
    else:
        _add_row(weights, q ** m - q ** (m - 1), null_total)
        for r, e, cnt in dist.counts:
            bc = beta_class_counts(q, m, r, e, b_zero=True)
            _add_row(weights, weight_from_profile(q, m, r, e, True, "major"), cnt * bc["major"])
            _add_row(weights, weight_from_profile(q, m, r, e, True, "minor"), cnt * bc["minor"])
        if variant == "2":
            _add_row(weights, n, q - 1)
            _add_row(weights, q ** m - q ** (m - 1) - 1, null_total * (q - 1))
            for r, e, cnt in dist.counts:
                bc = beta_class_counts(q, m, r, e, b_zero=False)
                _add_row(weights, weight_from_profile(q, m, r, e, False, "major"),
                         cnt * bc["major"] * (q - 1))
                _add_row(weights, weight_from_profile(q, m, r, e, False, "minor"),
                         cnt * bc["minor"] * (q - 1))

    spec = Spectrum(n=n, q=q, weights=weights)
    size = dist.total() + 1
    ms = round(np.log(size) / np.log(q))
    if q ** ms != size or ms % m != 0:
        raise HypothesisError("family size is not q^{ms}")
    expected_dim = {"base": ms, "0": ms + 1, "1": ms + m, "2": ms + m + 1}[variant]
    if spec.dim() != expected_dim:
        raise HypothesisError(f"frequency sum gives dimension {spec.dim()}, expected {expected_dim}")
    return spec


# -- single-monomial codes ------------------------------------------------------

@dataclass(frozen=True)
class MonomialPrediction:
    params: CodeParams
    spectrum: Spectrum          # shortened view for base/0, full length for 1/2
    full_spectrum: Spectrum     # length q^m - 1 view
    D: int
    notes: tuple[str, ...] = ()


def predict_monomial(q: int, m: int, ell: int, variant: str) -> MonomialPrediction:
    """Shortened codes from x^{q^l+1}: length (q^m-1)/D, D = q^{(m,l)}+1."""
    if variant not in ("base", "0"):
        raise ValueError("shortened predictions cover variants base and 0")
    dist = rank_distribution_monomial(q, m, ell)
    full = predict_general(q, m, dist, variant)
    delta = gcd(m, ell)
    D = q ** delta + 1
    short = full.scaled_down(D)
    half = m // 2
    e_half_even = eps_ell(m, ell) == 1
    if variant == "base":
        dprime = q ** half - 1 if e_half_even else q ** half - q ** delta
        d = q ** (half - 1) * (q - 1) * dprime // D
        k = m
    else:
        dbar = q ** (half + delta - 1) + 1 if e_half_even else q ** (half + delta - 1) * (q - 1)
        d = (q ** (m - 1) * (q - 1) - dbar) // D
        k = m + 1
    if d != short.min_distance():
        raise HypothesisError(f"distance formula {d} disagrees with table minimum "
                              f"{short.min_distance()}")
    note = (f"full-length weights are {D} x the shortened weights "
            f"(the full word is {D} concatenated copies)",)
    return MonomialPrediction(params=CodeParams(short.n, k, d), spectrum=short,
                              full_spectrum=full, D=D, notes=note)


def predict_monomial_long(q: int, m: int, ell: int, variant: str) -> MonomialPrediction:
    """Full-length codes from x^{q^l+1} with the linear/constant terms added."""
    if variant not in ("1", "2"):
        raise ValueError("long predictions cover variants 1 and 2")
    dist = rank_distribution_monomial(q, m, ell)
    full = predict_general(q, m, dist, variant)
    delta = gcd(m, ell)
    half = m // 2
    dprime = q ** (half + delta - 1) if eps_ell(m, ell) == 1 else (q - 1) * q ** (half + delta - 1)
    d = q ** (m - 1) * (q - 1) - dprime
    if variant == "2":
        d -= 1
    k = 2 * m + (1 if variant == "2" else 0)
    if d != full.min_distance():
        raise HypothesisError(f"distance formula {d} disagrees with table minimum "
                              f"{full.min_distance()}")
    return MonomialPrediction(params=CodeParams(full.n, k, d), spectrum=full,
                              full_spectrum=full, D=q ** delta + 1)


def predict_l3l(p: int, m: int, ell: int, variant: str) -> MonomialPrediction:
    """Full-length codes of the two-monomial family <x^{p^l}, x^{p^{3l}}>, p odd."""
    dist = rank_distribution_l3l(p, m, ell)
    full = predict_general(p, m, dist, variant)
    k = {"base": 2 * m, "0": 2 * m + 1, "1": 3 * m, "2": 3 * m + 1}[variant]
    d = full.min_distance()
    notes = []
    half, delta = m // 2, gcd(m, ell)
    if variant in ("0", "2"):
        if eps_ell(m, ell) == 1:
            dprime = p ** (half + 3 * delta - 1) + 1
            d0 = p ** (m - 1) * (p - 1) - dprime
        else:
            d0 = p ** (m - 1) * (p - 1) - (p - 1) * p ** (half + 3 * delta - 1)
        dhat = d0 if (variant == "0" or eps_ell(m, ell) == 1) else d0 - 1
        if dhat != d:
            warnings.warn(f"stated distance {dhat} disagrees with the assembled "
                          f"table minimum {d}; reporting the table value")
            notes.append(f"distance formula gave {dhat}, table minimum is {d}")
    return MonomialPrediction(params=CodeParams(full.n, k, d), spectrum=full,
                              full_spectrum=full, D=1, notes=tuple(notes))


# -- brute force ----------------------------------------------------------------

@dataclass
class BruteResult:
    params: CodeParams
    spectrum: Spectrum
    expected_words: int
    distinct_words: int
    compositions: dict[tuple[int, ...], int] | None = None

    @property
    def injective(self) -> bool:
        return self.distinct_words == self.expected_words


def _coordinates(ctx: FieldCtx, spec: CodeSpec) -> np.ndarray:
    N = ctx.mult_order
    xs = ctx.exp[:N].copy()
    if spec.shortened:
        q = spec.family.q
        delta = gcd(spec.family.m, spec.family.exponents[0])
        D = q ** delta + 1
        if N % D != 0:
            raise HypothesisError("shortened length is not integral")
        xs = xs[: N // D]
    return xs


def build_codeword(ctx: FieldCtx, spec: CodeSpec, R: LinearizedPoly,
                   beta: int = 0, b_sym: int = 0) -> np.ndarray:
    """Symbol vector of one codeword (canonical F_q symbols)."""
    fam = spec.family
    if beta != 0 and spec.variant not in ("1", "2"):
        raise ValueError(f"variant {spec.variant} has no beta term")
    if b_sym != 0 and spec.variant not in ("0", "2"):
        raise ValueError(f"variant {spec.variant} has no constant term")
    sy = ctx.symbols(fam.s)
    xs = _coordinates(ctx, spec)
    syms = np.zeros(len(xs), dtype=np.int16)
    for l, c in zip(R.q_exponents, R.coeffs):
        if c:
            pt = ctx.power_table(fam.q ** l + 1)[xs]
            syms = sy.add[syms, sy.trace_sym[ctx.v_mul(np.full(len(xs), c, dtype=np.int64), pt)]]
    if beta:
        syms = sy.add[syms, sy.trace_sym[ctx.v_mul(np.full(len(xs), beta, dtype=np.int64), xs)]]
    if b_sym:
        syms = sy.add[syms, np.full(len(xs), b_sym, dtype=np.int16)]
    return syms


def _row_hashes(mat: np.ndarray, coord_mults: np.ndarray) -> np.ndarray:
    """64-bit word fingerprints (wraparound polynomial hash over coordinates)."""
    return (mat.astype(np.uint64) + np.uint64(1)) @ coord_mults


def brute_spectrum(ctx: FieldCtx, spec: CodeSpec, budget: int = DEFAULT_BUDGET,
                   collect_compositions: bool = False,
                   workers: int = 1) -> BruteResult:
    """Exact spectrum by enumerating every word index; reports injectivity.

    Work is counted in symbol evaluations and refused above `budget`.
    """
    fam = spec.family
    q, m, s = fam.q, fam.m, fam.s
    if ctx.p != fam.p or ctx.n != fam.n:
        raise FieldError("field does not match family")
    xs = _coordinates(ctx, spec)
    n = len(xs)
    n_forms = ctx.order ** len(fam.exponents)
    n_words = n_forms
    if spec.variant in ("1", "2"):
        n_words *= ctx.order
    if spec.variant in ("0", "2"):
        n_words *= q
    if n_words * n > budget:
        raise BudgetError(f"{n_words} words x {n} symbols exceeds budget {budget}")

    sy = ctx.symbols(s)
    with_beta = spec.variant in ("1", "2")
    with_b = spec.variant in ("0", "2")
    if workers > 1 and with_beta:
        return _brute_parallel(ctx, spec, budget, collect_compositions, workers)

    power_tables = [ctx.power_table(q ** l + 1)[xs] for l in fam.exponents]
    beta_syms = None
    if with_beta:
        betas = np.arange(ctx.order, dtype=np.int64)
        beta_syms = sy.trace_sym[ctx.v_mul(betas[:, None], xs[None, :])]

    coord_mults = _HASH_MULT ** np.arange(1, n + 1, dtype=np.uint64)
    weight_counts: dict[int, int] = {}
    comp_counts: dict[tuple[int, ...], int] = {}
    hashes: list[np.ndarray] = []
    order_zech = np.concatenate([[0], ctx.exp[: ctx.mult_order]]).astype(np.int64)

    def tally_matrix(sym_mat: np.ndarray):
        rows = sym_mat.shape[0]
        comp = np.bincount(
            (np.arange(rows, dtype=np.int64)[:, None] * q + sym_mat).ravel(),
            minlength=rows * q).reshape(rows, q)
        for b in range(q) if with_b else (0,):
            zeros = comp[:, int(sy.neg[b])] if b else comp[:, 0]
            for w, c in zip(*np.unique(n - zeros, return_counts=True)):
                weight_counts[int(w)] = weight_counts.get(int(w), 0) + int(c)
            shifted = sy.add[sym_mat, np.int16(b)] if b else sym_mat
            hashes.append(_row_hashes(shifted, coord_mults))
        if collect_compositions:
            for row in comp:
                key = tuple(int(v) for v in row)
                comp_counts[key] = comp_counts.get(key, 0) + 1

    def coeff_tuples():
        if len(fam.exponents) == 1:
            for c in order_zech:
                yield (int(c),)
        else:
            def rec(prefix):
                if len(prefix) == len(fam.exponents):
                    yield prefix
                    return
                for c in order_zech:
                    yield from rec(prefix + (int(c),))
            yield from rec(())

    for coeffs in coeff_tuples():
        base = np.zeros(n, dtype=np.int16)
        for c, pt in zip(coeffs, power_tables):
            if c:
                base = sy.add[base, sy.trace_sym[ctx.v_mul(np.full(n, c, dtype=np.int64), pt)]]
        if with_beta:
            tally_matrix(sy.add[base[None, :], beta_syms])
        else:
            tally_matrix(base[None, :])

    all_hashes = np.concatenate(hashes)
    distinct = int(len(np.unique(all_hashes)))
    spectrum = Spectrum(n=n, q=q, weights=weight_counts)
    params = CodeParams(n=n, k=spectrum.dim(), d=spectrum.min_distance())
    return BruteResult(params=params, spectrum=spectrum, expected_words=n_words,
                       distinct_words=distinct,
                       compositions=comp_counts if collect_compositions else None)


def _brute_worker(args):
    (p, nfield, fam, variant, shortened, budget, collect, lo, hi) = args
    from .gf import get_field
    ctx = get_field(p, nfield)
    return _brute_chunk(ctx, CodeSpec(fam, variant, shortened), budget, collect, lo, hi)


def _brute_chunk(ctx, spec, budget, collect, lo, hi):
    """Brute tally restricted to a contiguous range of coefficient indices."""
    fam = spec.family
    q, s = fam.q, fam.s
    xs = _coordinates(ctx, spec)
    n = len(xs)
    sy = ctx.symbols(s)
    order_zech = np.concatenate([[0], ctx.exp[: ctx.mult_order]]).astype(np.int64)
    power_tables = [ctx.power_table(q ** l + 1)[xs] for l in fam.exponents]
    betas = np.arange(ctx.order, dtype=np.int64)
    beta_syms = sy.trace_sym[ctx.v_mul(betas[:, None], xs[None, :])]
    coord_mults = _HASH_MULT ** np.arange(1, n + 1, dtype=np.uint64)
    with_b = spec.variant == "2"
    weight_counts: dict[int, int] = {}
    comp_counts: dict[tuple[int, ...], int] = {}
    hashes: list[np.ndarray] = []
    for ci in range(lo, hi):
        coeffs = []
        rest = ci
        for _ in fam.exponents:
            coeffs.append(int(order_zech[rest % ctx.order]))
            rest //= ctx.order
        base = np.zeros(n, dtype=np.int16)
        for c, pt in zip(coeffs, power_tables):
            if c:
                base = sy.add[base, sy.trace_sym[ctx.v_mul(np.full(n, c, dtype=np.int64), pt)]]
        sym_mat = sy.add[base[None, :], beta_syms]
        rows = sym_mat.shape[0]
        comp = np.bincount(
            (np.arange(rows, dtype=np.int64)[:, None] * q + sym_mat).ravel(),
            minlength=rows * q).reshape(rows, q)
        for b in range(q) if with_b else (0,):
            zeros = comp[:, int(sy.neg[b])] if b else comp[:, 0]
            for w, c in zip(*np.unique(n - zeros, return_counts=True)):
                weight_counts[int(w)] = weight_counts.get(int(w), 0) + int(c)
            shifted = sy.add[sym_mat, np.int16(b)] if b else sym_mat
            hashes.append(_row_hashes(shifted, coord_mults))
        if collect:
            for row in comp:
                key = tuple(int(v) for v in row)
                comp_counts[key] = comp_counts.get(key, 0) + 1
    return weight_counts, comp_counts, np.concatenate(hashes) if hashes else np.empty(0, np.uint64)


def _brute_parallel(ctx, spec, budget, collect, workers):
    from multiprocessing import get_context
    fam = spec.family
    n_forms = ctx.order ** len(fam.exponents)
    bounds = np.linspace(0, n_forms, workers + 1, dtype=int)
    jobs = [(ctx.p, ctx.n, fam, spec.variant, spec.shortened, budget, collect,
             int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if lo < hi]
    with get_context("fork").Pool(len(jobs)) as pool:
        parts = pool.map(_brute_worker, jobs)
    weight_counts: dict[int, int] = {}
    comp_counts: dict[tuple[int, ...], int] = {}
    hash_parts = []
    for wc, cc, hs in parts:
        for w, c in wc.items():
            weight_counts[w] = weight_counts.get(w, 0) + c
        for k, c in cc.items():
            comp_counts[k] = comp_counts.get(k, 0) + c
        hash_parts.append(hs)
    xs = _coordinates(ctx, spec)
    q = fam.q
    n_words = n_forms * ctx.order * (q if spec.variant == "2" else 1)
    spectrum = Spectrum(n=len(xs), q=q, weights=weight_counts)
    params = CodeParams(n=len(xs), k=spectrum.dim(), d=spectrum.min_distance())
    return BruteResult(params=params, spectrum=spectrum, expected_words=n_words,
                       distinct_words=int(len(np.unique(np.concatenate(hash_parts)))),
                       compositions=comp_counts if collect else None)


# -- complete weight enumerator --------------------------------------------------

@dataclass(frozen=True)
class CweTerm:
    coeff: int
    z0_exp: int
    zrest_exp: int


@dataclass
class CweResult:
    n: int
    q: int
    terms: tuple[CweTerm, ...]       # compressed: coeff * z0^a * (z1..z_{q-1})^b
    balanced_verified: bool | None   # None when brute verification was skipped
    brute_match: bool | None = None


def cwe_predicted(q: int, m: int, dist: RankDistribution, D: int = 1) -> list[CweTerm]:
    """Compressed enumerator terms from a rank distribution (shortened by D)."""
    n = (q ** m - 1) // D
    terms = [CweTerm(coeff=1, z0_exp=n, zrest_exp=0)]
    for r, e, cnt in dist.counts:
        w_full = weight_from_profile(q, m, r, e, True, "major")
        if w_full % D or (q ** m - 1 - w_full) % D:
            raise HypothesisError(f"weight {w_full} does not shorten by {D}")
        a = (q ** m - 1 - w_full) // D
        b_num = w_full // D
        if b_num % (q - 1) != 0:
            raise HypothesisError("weight not divisible by q-1: composition not balanced")
        terms.append(CweTerm(coeff=cnt, z0_exp=a, zrest_exp=b_num // (q - 1)))
    return sorted(terms, key=lambda t: (-t.z0_exp, t.zrest_exp))


def cwe(ctx: FieldCtx, spec: CodeSpec, dist: RankDistribution,
        budget: int = DEFAULT_BUDGET) -> CweResult:
    """Compressed complete weight enumerator of a base-variant code.

    When the code fits in the budget, every word's composition is checked to
    be balanced (t_i equal for all i > 0) and the compressed form is compared
    with the brute tally.
    """
    if spec.variant != "base":
        raise ValueError("the complete weight enumerator applies to base codes")
    fam = spec.family
    q = fam.q
    D = 1
    if spec.shortened:
        D = q ** gcd(fam.m, fam.exponents[0]) + 1
    terms = cwe_predicted(q, fam.m, dist, D)
    n = (q ** fam.m - 1) // D
    balanced: bool | None = None
    match: bool | None = None
    work = (ctx.order ** len(fam.exponents)) * n
    if work <= budget:
        res = brute_spectrum(ctx, spec, budget=budget, collect_compositions=True)
        balanced = True
        observed: dict[tuple[int, int], int] = {}
        for comp, cnt in res.compositions.items():
            if len(set(comp[1:])) > 1:
                raise HypothesisError(f"composition {comp} is not balanced")
            key = (comp[0], comp[1])
            observed[key] = observed.get(key, 0) + cnt
        predicted = {}
        for t in terms:
            predicted[(t.z0_exp, t.zrest_exp)] = predicted.get((t.z0_exp, t.zrest_exp), 0) + t.coeff
        match = observed == predicted
    return CweResult(n=n, q=q, terms=tuple(terms), balanced_verified=balanced,
                     brute_match=match)


# -- divisibility and dimension checks -------------------------------------------

def divisibility_report(spectrum: Spectrum, q: int, m: int, ranks: list[int],
                        variant: str) -> dict:
    """Check the q^{m-r_max/2-1}(q-1) (base) / q^{m-r_max/2-1} (variant 1) division."""
    r_max = max(ranks)
    t = q ** (m - r_max // 2 - 1) * ((q - 1) if variant == "base" else 1)
    offenders = [w for w in spectrum.weights if w > 0 and w % t != 0]
    return {"divisor": t, "ok": not offenders, "offenders": offenders}


def dimension_oracle(q: int, m: int, exponents: list[int]) -> int:
    """Sum of q-cyclotomic coset sizes of the exponents mod q^m - 1.

    Verifies each coset has size exactly m and that cosets are disjoint;
    anything else signals parameters outside the dimension hypotheses.
    """
    N = q ** m - 1
    seen: dict[int, int] = {}
    total = 0
    for u in exponents:
        u %= N
        if u == 0:
            raise HypothesisError("exponent 0 mod q^m-1 has a size-1 coset; append it separately")
        coset = []
        v = u
        while True:
            coset.append(v)
            v = (v * q) % N
            if v == u:
                break
        if len(coset) != m:
            raise HypothesisError(f"coset of {u} has size {len(coset)}, expected {m}")
        for v in coset:
            if v in seen:
                raise HypothesisError(f"cosets of {u} and {seen[v]} collide")
            seen[v] = u
        total += len(coset)
    return total
