"""Finite fields F_{p^n} with exp/log tables, subfields and trace maps.

A field element is a plain int in [0, p^n): its base-p digits are the
coordinates in the power basis {1, t, .., t^{n-1}} of the modulus root t.
Construction is deterministic: the modulus is the first irreducible monic
polynomial of degree n in ascending order of its digit encoding
(constant term least significant), and alpha is the first element of full
multiplicative order in the same ascending element order.

Scalar arithmetic works on ints; the v_* methods operate on numpy arrays of
element indices and back every bulk sweep in the package.  FieldCtx is
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

DEFAULT_SIZE_LIMIT = 1 << 22


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fields are capped well below 2^32)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- polynomial helpers over F_p (coefficient tuples, constant term first) --
# Only used during construction; all later arithmetic is table-driven.

def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _pmod(a, f, p):
    a = list(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i] % p
        if c:
            q = (c * inv_lead) % p
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - q * f[j]) % p
    return a[:df] if df > 0 else []


def _pmulmod(a, b, f, p):
    return _pmod(_pmul(a, b, p), f, p)


def _ppowmod(base, e, f, p):
    result = [1]
    b = list(base)
    while e:
        if e & 1:
            result = _pmulmod(result, b, f, p)
        b = _pmulmod(b, b, f, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while any(c % p for c in b):
        while b and b[-1] % p == 0:
            b.pop()
        a = _pmod(a, b, p)
        a, b = b, a
        while a and a[-1] % p == 0:
            a.pop()
    return a


def _is_irreducible(f, p, n):
    # Rabin: x^{p^n} = x mod f, and gcd(x^{p^{n/r}} - x, f) = 1 for prime r | n.
    if n == 1:
        return True
    x = [0, 1]
    xq = x
    for _ in range(n):
        xq = _ppowmod(xq, p, f, p)
    if (_pmod(xq, f, p) + [0] * n)[:n] != (_pmod(x, f, p) + [0] * n)[:n]:
        return False
    for r in factorize(n):
        xr = x
        for _ in range(n // r):
            xr = _ppowmod(xr, p, f, p)
        diff = [(a - b) % p for a, b in zip((xr + [0] * n)[:n], (x + [0] * n)[:n])]
        g = _pgcd(list(f), diff, p)
        if len(g) != 1:
            return False
    return True


def _digits_of(value: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        out.append(value % p)
        value //= p
    return out


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class Subfield:
    """The unique subfield of size p^d inside F_{p^n}, with a canonical indexing."""

    d: int
    size: int
    elements: np.ndarray          # sorted element indices, elements[0] == 0
    index_of: np.ndarray          # element index -> canonical 0..size-1, -1 outside
    gen: int                      # alpha^{(p^n-1)/(p^d-1)}, generator of the subfield

    def contains(self, e: int) -> bool:
        return self.index_of[e] >= 0


class FieldCtx:
    """F_{p^n} with full exp/log tables (built for p^n <= size limit)."""

    def __init__(self, p: int, n: int, size_limit: int = DEFAULT_SIZE_LIMIT):
        if not is_prime(p):
            raise FieldError(f"p must be prime, got {p}")
        if n < 1:
            raise FieldError(f"extension degree must be >= 1, got {n}")
        order = p ** n
        if order > size_limit:
            raise FieldError(f"p^n = {order} exceeds size bound {size_limit}")
        self.p = p
        self.n = n
        self.order = order
        self.mult_order = order - 1
        self.modulus = self._find_modulus()
        self.pvec = np.array([p ** i for i in range(n)], dtype=np.int64)
        self._digmat = ((np.arange(order, dtype=np.int64)[:, None] // self.pvec) % p).astype(np.int8)
        self.alpha = self._find_alpha()
        self._build_tables()
        self._frob_tables: dict[int, np.ndarray] = {}
        self._symbols: dict[int, SymbolSystem] = {}
        self._subfields: dict[int, Subfield] = {}

    # -- construction ------------------------------------------------------

    def _find_modulus(self) -> tuple[int, ...]:
        p, n = self.p, self.n
        for enc in range(p ** n):
            f = _digits_of(enc, p, n) + [1]
            if _is_irreducible(f, p, n):
                return tuple(f)
        raise FieldError("no irreducible polynomial found")  # unreachable

    def _poly_mul_idx(self, a: int, b: int) -> int:
        pa = _digits_of(a, self.p, self.n)
        pb = _digits_of(b, self.p, self.n)
        prod = _pmod(_pmul(pa, pb, self.p), list(self.modulus), self.p)
        prod = (prod + [0] * self.n)[: self.n]
        return int(sum(c * self.p ** i for i, c in enumerate(prod)))

    def _poly_pow_idx(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._poly_mul_idx(result, base)
            base = self._poly_mul_idx(base, base)
            e >>= 1
        return result

    def _find_alpha(self) -> int:
        N = self.mult_order
        if N == 1:
            return 1
        radicals = [N // r for r in factorize(N)]
        for cand in range(2, self.order):
            if all(self._poly_pow_idx(cand, e) != 1 for e in radicals):
                return cand
        raise FieldError("no primitive element found")  # unreachable

    def _build_tables(self):
        N, p, n = self.mult_order, self.p, self.n
        mult_alpha = np.zeros((n, n), dtype=np.int64)
        for j in range(n):
            mult_alpha[:, j] = self._digmat[self._poly_mul_idx(self.alpha, int(self.pvec[j]))]
        exp = np.zeros(2 * N, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        v = self._digmat[1].astype(np.int64)
        for k in range(N):
            e = int(v @ self.pvec)
            exp[k] = e
            log[e] = k
            v = (mult_alpha @ v) % p
        if int(v @ self.pvec) != 1:
            raise FieldError("alpha order verification failed")
        exp[N:] = exp[:N]
        self.exp = exp
        self.log = log

    # -- scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        d = (self._digmat[a].astype(np.int64) + self._digmat[b]) % self.p
        return int(d @ self.pvec)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        d = (-self._digmat[a].astype(np.int64)) % self.p
        return int(d @ self.pvec)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.exp[(self.mult_order - self.log[a]) % self.mult_order])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % self.mult_order])

    def frob(self, a: int, j: int) -> int:
        """a^{p^j}."""
        return self.pow(a, self.p ** (j % self.n))

    def alpha_pow(self, k: int) -> int:
        return int(self.exp[k % self.mult_order])

    def element_digits(self, a: int) -> list[int]:
        return [int(c) for c in self._digmat[a]]

    # -- bulk arithmetic on arrays of element indices -------------------------

    def v_add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return a ^ b
        d = self._digmat[a].astype(np.int16) + self._digmat[b]
        d -= self.p * (d >= self.p)
        return (d @ self.pvec.astype(np.int64)).astype(np.int64)

    def v_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = self.exp[self.log[a] + self.log[b]]
        zero = (a == 0) | (b == 0)
        if np.any(zero):
            out = np.where(zero, 0, out)
        return out

    def frob_table(self, j: int) -> np.ndarray:
        """Lookup table e -> e^{p^j} over all elements."""
        j %= self.n
        tab = self._frob_tables.get(j)
        if tab is None:
            N = self.mult_order
            tab = np.zeros(self.order, dtype=np.int64)
            ks = np.arange(N, dtype=np.int64)
            tab[self.exp[:N]] = self.exp[(ks * pow(self.p, j, N)) % N] if N > 1 else self.exp[:N]
            self._frob_tables[j] = tab
        return tab

    def power_table(self, e: int) -> np.ndarray:
        """Lookup table x -> x^e over all elements (0 -> 0 for e > 0)."""
        N = self.mult_order
        tab = np.zeros(self.order, dtype=np.int64)
        if N > 0:
            ks = np.arange(N, dtype=np.int64)
            tab[self.exp[:N]] = self.exp[(ks * (e % N)) % N]
        return tab

    # -- subfields, traces, symbols -------------------------------------------

    def subfield(self, d: int) -> Subfield:
        if self.n % d != 0:
            raise FieldError(f"subfield degree {d} does not divide {self.n}")
        sub = self._subfields.get(d)
        if sub is None:
            all_e = np.arange(self.order, dtype=np.int64)
            members = all_e[self.frob_table(d)[all_e] == all_e]
            size = self.p ** d
            if len(members) != size:
                raise FieldError("subfield size check failed")
            index_of = np.full(self.order, -1, dtype=np.int64)
            index_of[members] = np.arange(size)
            gen = self.alpha_pow(self.mult_order // (size - 1)) if size > 1 else 1
            sub = Subfield(d=d, size=size, elements=members, index_of=index_of, gen=gen)
            self._subfields[d] = sub
        return sub

    def trace_table(self, d: int) -> np.ndarray:
        """tr_{p^n/p^d} as a lookup table over all elements."""
        return self.symbols(d).trace_elem

    def trace(self, a: int, d: int) -> int:
        return int(self.trace_table(d)[a])

    def symbols(self, d: int) -> "SymbolSystem":
        if self.n % d != 0:
            raise FieldError(f"subfield degree {d} does not divide {self.n}")
        sys = self._symbols.get(d)
        if sys is None:
            sys = SymbolSystem(self, d)
            self._symbols[d] = sys
        return sys


class SymbolSystem:
    """Canonical F_q = F_{p^d} symbol indexing inside F_{p^n}, q = p^d.

    Symbols are 0..q-1 in ascending element-index order (so symbol 0 is the
    zero element).  trace_sym[e] is the symbol of tr_{p^n/p^d}(e); add/neg are
    symbol-level tables used by the codeword engines.
    """

    def __init__(self, ctx: FieldCtx, d: int):
        self.ctx = ctx
        self.d = d
        self.q = ctx.p ** d
        sub = ctx.subfield(d)
        self.elements = sub.elements
        self.index_of = sub.index_of
        k = ctx.n // d
        all_e = np.arange(ctx.order, dtype=np.int64)
        acc = all_e.copy()
        x = all_e
        for _ in range(k - 1):
            x = ctx.frob_table(d)[x]
            acc = ctx.v_add(acc, x)
        if not np.all(ctx.frob_table(d)[acc] == acc):
            raise FieldError("trace values escaped the subfield")
        self.trace_elem = acc
        self.trace_sym = self.index_of[acc].astype(np.int16)
        grid = ctx.v_add(self.elements[:, None], self.elements[None, :])
        self.add = self.index_of[grid].astype(np.int16)
        self.neg = self.index_of[np.array([ctx.neg(int(e)) for e in self.elements])].astype(np.int16)

    def sym(self, e: int) -> int:
        s = int(self.index_of[e])
        if s < 0:
            raise FieldError("element outside subfield")
        return s

    def elem(self, s: int) -> int:
        return int(self.elements[s])


def make_field(p: int, n: int, size_limit: int = DEFAULT_SIZE_LIMIT) -> FieldCtx:
    """Construct F_{p^n} deterministically; errors if p is not prime or p^n too large."""
    return FieldCtx(p, n, size_limit)


@lru_cache(maxsize=None)
def get_field(p: int, n: int) -> FieldCtx:
    """Cached frontend to make_field (contexts are immutable)."""
    return make_field(p, n)


def subfield_embed(ctx: FieldCtx, d: int) -> Subfield:
    """Description of F_{p^d} inside F_{p^n}: membership, canonical indexing, generator."""
    return ctx.subfield(d)


def rel_trace(ctx: FieldCtx, x: int, sub_deg: int) -> int:
    """tr_{p^n/p^d}(x) = sum of x^{p^{d i}}, lands in the subfield of size p^d."""
    if ctx.n % sub_deg != 0:
        raise FieldError(f"trace degree {sub_deg} does not divide {ctx.n}")
    return ctx.trace(x, sub_deg)


def power_residue_test(ctx: FieldCtx, gamma: int, e: int) -> bool:
    """True iff gamma is an e-th power in F_{p^n}^*, via gamma^{(p^n-1)/gcd(p^n-1, e)} = 1."""
    if gamma == 0:
        raise FieldError("power residue test needs gamma != 0")
    g = gcd(ctx.mult_order, e)
    return ctx.pow(gamma, ctx.mult_order // g) == 1
