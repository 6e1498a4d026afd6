"""Arithmetic in prime fields, extension fields GF(p^k), and Galois rings GR(4^m).

Elements are immutable coefficient vectors over the base ring Z_p (or Z_4),
least-significant coefficient first.  A context object holds the defining
polynomial together with precomputed multiplication matrices and trace data;
contexts are immutable after construction and every operation is pure.

The computational-basis label of an element is the base-p (base-4) integer of
its coefficient vector, least-significant coefficient first.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GfContext",
    "GfElement",
    "GrContext",
    "GrElement",
    "gf_build_context",
    "gf_trace",
    "gf_gauss_sum",
    "gr_build_context",
    "gr_2adic",
    "gr_trace",
    "gr_exponential_sum",
    "is_prime",
]

_SIZE_CAP = 2**16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(math.isqrt(n)) + 1):
        if n % q == 0:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _poly_mul_mod(x: tuple[int, ...], y: tuple[int, ...], h: tuple[int, ...], base: int) -> tuple[int, ...]:
    """Multiply two degree-<k polynomials modulo a monic degree-k polynomial.

    h holds the low coefficients (h_0, ..., h_{k-1}); the leading 1 is implicit.
    """
    k = len(h)
    prod = [0] * (2 * k - 1)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                prod[i + j] = (prod[i + j] + xi * yj) % base
    # reduce: X^k = -(h_0 + h_1 X + ... + h_{k-1} X^{k-1})
    for deg in range(2 * k - 2, k - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for j in range(k):
                prod[deg - k + j] = (prod[deg - k + j] - c * h[j]) % base
    return tuple(prod[:k])


def _poly_pow_mod(x: tuple[int, ...], e: int, h: tuple[int, ...], base: int) -> tuple[int, ...]:
    k = len(h)
    acc = tuple([1] + [0] * (k - 1))
    sq = x
    while e:
        if e & 1:
            acc = _poly_mul_mod(acc, sq, h, base)
        sq = _poly_mul_mod(sq, sq, h, base)
        e >>= 1
    return acc


def _root_has_order(h: tuple[int, ...], base: int, order: int) -> bool:
    """Check that X mod h(X) has multiplicative order exactly `order`."""
    k = len(h)
    one = tuple([1] + [0] * (k - 1))
    if k == 1:
        root = ((-h[0]) % base,)
    else:
        root = tuple([0, 1] + [0] * (k - 2))
    if _poly_pow_mod(root, order, h, base) != one:
        return False
    return all(_poly_pow_mod(root, order // q, h, base) != one for q in _prime_factors(order))


@dataclass(frozen=True)
class GfElement:
    """Element of GF(p^k) as a coefficient tuple over Z_p (constant term first)."""

    ctx: "GfContext"
    coeffs: tuple[int, ...]

    def __add__(self, other: "GfElement") -> "GfElement":
        self._check(other)
        return GfElement(self.ctx, tuple((a + b) % self.ctx.p for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "GfElement") -> "GfElement":
        return self + (-other)

    def __neg__(self) -> "GfElement":
        return GfElement(self.ctx, tuple((-a) % self.ctx.p for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return GfElement(self.ctx, tuple((other * a) % self.ctx.p for a in self.coeffs))
        self._check(other)
        return GfElement(self.ctx, _poly_mul_mod(self.coeffs, other.coeffs, self.ctx.h, self.ctx.p))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "GfElement":
        if e < 0:
            return self.inverse() ** (-e)
        return GfElement(self.ctx, _poly_pow_mod(self.coeffs, e, self.ctx.h, self.ctx.p))

    def inverse(self) -> "GfElement":
        if not any(self.coeffs):
            raise ZeroDivisionError("inverse of zero in GF(p^k)")
        return self ** (self.ctx.order - 2)

    def trace(self) -> int:
        return self.ctx.trace(self)

    @property
    def int_label(self) -> int:
        return sum(c * self.ctx.p**i for i, c in enumerate(self.coeffs))

    def _check(self, other: "GfElement") -> None:
        if other.ctx is not self.ctx:
            raise ValueError("elements belong to different field contexts")


class GfContext:
    """GF(p^k) built as F_p[X]/(h) for the lexicographically smallest monic
    primitive h, found by brute-force order testing of the root X.

    Attributes:
        p, k: characteristic and extension degree
        h: coefficients (h_0, ..., h_{k-1}) of the monic defining polynomial
        mul_matrices: k x k multiplication matrix over F_p per basis monomial
        trace_vector: t with tr(x) = (t, coeffs(x)) mod p
    """

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if k < 1:
            raise ValueError("extension degree k must be >= 1")
        if p**k > _SIZE_CAP:
            raise ValueError(f"p^k = {p**k} exceeds the 2^16 size cap")
        self.p = p
        self.k = k
        self.order = p**k
        self.h = self._find_primitive(p, k)
        self._xi_powers = self._monomial_powers()
        self.mul_matrices = self._build_mul_matrices()
        self.trace_vector = self._build_trace_vector()

    @staticmethod
    def _find_primitive(p: int, k: int) -> tuple[int, ...]:
        # candidates ordered by the base-p integer of (h_0, ..., h_{k-1})
        for value in range(p**k):
            coeffs, v = [], value
            for _ in range(k):
                coeffs.append(v % p)
                v //= p
            h = tuple(coeffs)
            if _root_has_order(h, p, p**k - 1):
                return h
        raise RuntimeError(f"no primitive polynomial of degree {k} over F_{p}")  # pragma: no cover

    def _monomial_powers(self) -> list[tuple[int, ...]]:
        """Coefficient vectors of X^t mod h for t = 0 .. 2k-2."""
        one = self.one
        out = [one.coeffs]
        xi = self.xi
        cur = one
        for _ in range(2 * self.k - 2):
            cur = cur * xi
            out.append(cur.coeffs)
        return out

    def _build_mul_matrices(self) -> list[np.ndarray]:
        mats = []
        for i in range(self.k):
            m = np.zeros((self.k, self.k), dtype=np.int64)
            for j in range(self.k):
                m[:, j] = self._xi_powers[i + j]
            mats.append(m)
        return mats

    def _build_trace_vector(self) -> np.ndarray:
        t = np.zeros(self.k, dtype=np.int64)
        for i in range(self.k):
            mono = self.element_from_coeffs(self._xi_powers[i])
            acc = self.zero
            for j in range(self.k):
                acc = acc + mono ** (self.p**j)
            if any(acc.coeffs[1:]):
                raise RuntimeError("trace of a basis monomial left the prime field")  # pragma: no cover
            t[i] = acc.coeffs[0]
        return t

    @property
    def zero(self) -> GfElement:
        return GfElement(self, (0,) * self.k)

    @property
    def one(self) -> GfElement:
        return GfElement(self, tuple([1] + [0] * (self.k - 1)))

    @property
    def xi(self) -> GfElement:
        """The root of h, reduced (equals X for k >= 2, -h_0 for k = 1)."""
        if self.k == 1:
            return GfElement(self, ((-self.h[0]) % self.p,))
        return GfElement(self, tuple([0, 1] + [0] * (self.k - 2)))

    def element_from_coeffs(self, coeffs) -> GfElement:
        c = tuple(int(x) % self.p for x in coeffs)
        if len(c) != self.k:
            raise ValueError(f"expected {self.k} coefficients, got {len(c)}")
        return GfElement(self, c)

    def element_from_int(self, label: int) -> GfElement:
        if not 0 <= label < self.order:
            raise ValueError(f"label {label} out of range for GF({self.p}^{self.k})")
        coeffs = []
        for _ in range(self.k):
            coeffs.append(label % self.p)
            label //= self.p
        return GfElement(self, tuple(coeffs))

    def elements(self):
        """All p^k elements in integer-label order."""
        return [self.element_from_int(v) for v in range(self.order)]

    def trace(self, x: GfElement) -> int:
        if x.ctx is not self:
            raise ValueError("element belongs to a different field context")
        return int(np.dot(self.trace_vector, np.asarray(x.coeffs, dtype=np.int64)) % self.p)

    def monomial_vector(self, t: int) -> tuple[int, ...]:
        """Coefficient vector of X^t mod h, available for t = 0 .. 2k-2."""
        return self._xi_powers[t]

    def mul_matrix(self, y: GfElement) -> np.ndarray:
        """Matrix M_y over F_p with vec(y*x) = M_y @ vec(x)."""
        acc = sum(c * m for c, m in zip(y.coeffs, self.mul_matrices))
        return np.asarray(acc % self.p, dtype=np.int64)


def gf_build_context(p: int, k: int) -> GfContext:
    return GfContext(p, k)


def gf_trace(ctx: GfContext, x: GfElement) -> int:
    return ctx.trace(x)


def gf_gauss_sum(ctx: GfContext, a: GfElement) -> complex:
    """Additive character sum sum_x exp(2 pi i tr(a x) / p) over GF(p^k)."""
    total = 0j
    for x in ctx.elements():
        total += cmath.exp(2j * cmath.pi * ctx.trace(a * x) / ctx.p)
    return total


@dataclass(frozen=True)
class GrElement:
    """Element of GR(4^m) as a coefficient tuple over Z_4 (constant term first)."""

    ctx: "GrContext"
    coeffs: tuple[int, ...]

    def __add__(self, other: "GrElement") -> "GrElement":
        self._check(other)
        return GrElement(self.ctx, tuple((a + b) % 4 for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "GrElement") -> "GrElement":
        return self + (-other)

    def __neg__(self) -> "GrElement":
        return GrElement(self.ctx, tuple((-a) % 4 for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return GrElement(self.ctx, tuple((other * a) % 4 for a in self.coeffs))
        self._check(other)
        return GrElement(self.ctx, _poly_mul_mod(self.coeffs, other.coeffs, self.ctx.h, 4))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "GrElement":
        return GrElement(self.ctx, _poly_pow_mod(self.coeffs, e, self.ctx.h, 4))

    def trace(self) -> int:
        return self.ctx.trace(self)

    @property
    def int_label(self) -> int:
        return sum(c * 4**i for i, c in enumerate(self.coeffs))

    def _check(self, other: "GrElement") -> None:
        if other.ctx is not self.ctx:
            raise ValueError("elements belong to different ring contexts")


class GrContext:
    """GR(4^m) built as Z_4[X]/(h) for a monic basic primitive h of degree m.

    h is chosen as the smallest lift (by base-4 integer of its coefficient
    vector) of the degree-m primitive polynomial over F_2 whose root X has
    multiplicative order 2^m - 1.  The Teichmuller set is enumerated as
    {0, 1, X, ..., X^(2^m - 2)}.
    """

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("degree m must be >= 1")
        if 4**m > _SIZE_CAP:
            raise ValueError(f"4^m = {4**m} exceeds the 2^16 size cap")
        self.m = m
        self.h = self._find_basic_primitive(m)
        self.teichmuller = self._build_teichmuller()
        self._teich_index = {t.coeffs: i for i, t in enumerate(self.teichmuller)}
        self._adic: dict[tuple[int, ...], tuple[GrElement, GrElement]] | None = None
        self._trace_cache: dict[tuple[int, ...], int] = {}

    @staticmethod
    def _find_basic_primitive(m: int) -> tuple[int, ...]:
        base_h = GfContext(2, m).h
        # lifts of each F_2 coefficient are {b, b+2}; order candidates by base-4 value
        lifts = []
        for mask in range(2**m):
            coeffs = tuple(base_h[i] + 2 * ((mask >> i) & 1) for i in range(m))
            lifts.append((sum(c * 4**i for i, c in enumerate(coeffs)), coeffs))
        for _, h in sorted(lifts):
            if _root_has_order(h, 4, 2**m - 1):
                return h
        raise RuntimeError(f"no basic primitive lift found for m = {m}")  # pragma: no cover

    @property
    def zero(self) -> GrElement:
        return GrElement(self, (0,) * self.m)

    @property
    def one(self) -> GrElement:
        return GrElement(self, tuple([1] + [0] * (self.m - 1)))

    @property
    def x(self) -> GrElement:
        if self.m == 1:
            return GrElement(self, ((-self.h[0]) % 4,))
        return GrElement(self, tuple([0, 1] + [0] * (self.m - 2)))

    def _build_teichmuller(self) -> list[GrElement]:
        out = [self.zero, self.one]
        cur = self.one
        for _ in range(2**self.m - 2):
            cur = cur * self.x
            out.append(cur)
        if len({e.coeffs for e in out}) != 2**self.m:
            raise RuntimeError("Teichmuller set has repeated elements")  # pragma: no cover
        return out

    def _build_2adic_table(self) -> dict[tuple[int, ...], tuple[GrElement, GrElement]]:
        table = {}
        for a in self.teichmuller:
            for b in self.teichmuller:
                c = (a + 2 * b).coeffs
                if c in table:
                    raise RuntimeError("2-adic decomposition is not unique")  # pragma: no cover
                table[c] = (a, b)
        if len(table) != 4**self.m:
            raise RuntimeError("2-adic decomposition does not cover the ring")  # pragma: no cover
        return table

    def element_from_coeffs(self, coeffs) -> GrElement:
        c = tuple(int(x) % 4 for x in coeffs)
        if len(c) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {len(c)}")
        return GrElement(self, c)

    def element_from_int(self, label: int) -> GrElement:
        if not 0 <= label < 4**self.m:
            raise ValueError(f"label {label} out of range for GR(4^{self.m})")
        coeffs = []
        for _ in range(self.m):
            coeffs.append(label % 4)
            label //= 4
        return GrElement(self, tuple(coeffs))

    def elements(self):
        return [self.element_from_int(v) for v in range(4**self.m)]

    def teich_mul_index(self, i: int, j: int) -> int:
        """Index of teichmuller[i] * teichmuller[j]: the nonzero part of the
        Teichmuller set is cyclic of order 2^m - 1 under multiplication."""
        if i == 0 or j == 0:
            return 0
        return 1 + (i - 1 + j - 1) % (2**self.m - 1)

    def two_adic(self, c: GrElement) -> tuple[GrElement, GrElement]:
        if c.ctx is not self:
            raise ValueError("element belongs to a different ring context")
        if c.coeffs in self._teich_index:  # c = c + 2*0
            return c, self.zero
        if self._adic is None:
            self._adic = self._build_2adic_table()
        return self._adic[c.coeffs]

    def trace(self, c: GrElement) -> int:
        """Generalized trace: with c = a + 2b, sum_i (a^(2^i) + 2 b^(2^i)) mod 4."""
        if c.ctx is not self:
            raise ValueError("element belongs to a different ring context")
        cached = self._trace_cache.get(c.coeffs)
        if cached is not None:
            return cached
        a, b = self.two_adic(c)
        acc = self.zero
        for _ in range(self.m):
            acc = acc + a + 2 * b
            a, b = a * a, b * b
        if any(acc.coeffs[1:]):
            raise RuntimeError("generalized trace left Z_4")  # pragma: no cover
        val = acc.coeffs[0]
        self._trace_cache[c.coeffs] = val
        return val


def gr_build_context(m: int) -> GrContext:
    return GrContext(m)


def gr_2adic(ctx: GrContext, c: GrElement) -> tuple[GrElement, GrElement]:
    return ctx.two_adic(c)


def gr_trace(ctx: GrContext, c: GrElement) -> int:
    return ctx.trace(c)


# exact integer powers of i (1j**n goes through exp/log and picks up rounding)
I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def gr_exponential_sum(ctx: GrContext, x: GrElement) -> complex:
    """Gamma(x) = sum over the Teichmuller set of i^tr(x y)."""
    total = 0j
    for y in ctx.teichmuller:
        total += I_POWERS[ctx.trace(x * y) % 4]
    return total
