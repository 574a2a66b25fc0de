"""Certified numeric bounds: exact rationals plus directed-rounding dyadics.

Every inexact quantity in this package (n-th roots, fractional powers, complex
moduli, huge-exponent power comparisons) is handled through *enclosures*:
pairs ``lo <= value <= hi`` of rationals whose validity rests on integer
comparisons only.  No floating point is ever trusted for a verdict; floats may
appear as search accelerators but the final inequality is always re-certified
exactly or through directed rounding.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import NamedTuple, Optional

DEFAULT_BITS = 128
MAX_BITS = 4096


class InvalidInput(ValueError):
    """Malformed structure/weight/element data (CLI exit code 2)."""


class ResourceLimit(RuntimeError):
    """Computation would exceed the configured size limits (CLI exit code 2)."""


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or 'p' (also accepts ints)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Canonical 'p/q' (or 'p' when the denominator is 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def round_down(x: Fraction, bits: int) -> Fraction:
    """Largest dyadic multiple of 2**-bits that is <= x."""
    scaled = (x.numerator << bits) // x.denominator
    return Fraction(scaled, 1 << bits)


def round_up(x: Fraction, bits: int) -> Fraction:
    """Smallest dyadic multiple of 2**-bits that is >= x."""
    scaled = -((-x.numerator << bits) // x.denominator)
    return Fraction(scaled, 1 << bits)


def int_nth_root(a: int, n: int) -> int:
    """floor(a ** (1/n)) for integers a >= 0, n >= 1 (exact)."""
    if a < 0 or n < 1:
        raise ValueError("int_nth_root needs a >= 0 and n >= 1")
    if a in (0, 1) or n == 1:
        return a
    if n == 2:
        return isqrt(a)
    # Newton iteration on integers; the initial guess from bit length
    # overshoots, and the sequence is decreasing once above the root.
    x = 1 << (a.bit_length() // n + 1)
    while True:
        y = ((n - 1) * x + a // x ** (n - 1)) // n
        if y >= x:
            break
        x = y
    while x ** n > a:
        x -= 1
    return x


class Enclosure(NamedTuple):
    """Certified bracket lo <= value <= hi (both rationals)."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def exact(cls, x) -> "Enclosure":
        q = Fraction(x)
        return cls(q, q)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __add__(self, other):
        other = _as_enclosure(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __mul__(self, other):
        other = _as_enclosure(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def rounded(self, bits: int) -> "Enclosure":
        return Enclosure(round_down(self.lo, bits), round_up(self.hi, bits))

    def certainly_le(self, other) -> bool:
        other = _as_enclosure(other)
        return self.hi <= other.lo

    def certainly_lt(self, other) -> bool:
        other = _as_enclosure(other)
        return self.hi < other.lo

    def certainly_ge(self, other) -> bool:
        other = _as_enclosure(other)
        return self.lo >= other.hi

    def certainly_gt(self, other) -> bool:
        other = _as_enclosure(other)
        return self.lo > other.hi

    def to_json(self) -> dict:
        if self.is_exact:
            return {"exact": format_rational(self.lo)}
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi)}


def _as_enclosure(x) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure.exact(x)


def nth_root(x: Fraction, n: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """Certified enclosure of x**(1/n) for x >= 0, width <= 2**-bits.

    Returns an exact (zero-width) enclosure when x is a perfect n-th power
    of a rational.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError("nth_root needs x >= 0")
    if n < 1:
        raise ValueError("nth_root needs n >= 1")
    if n == 1 or x == 0 or x == 1:
        return Enclosure.exact(x)
    p, q = x.numerator, x.denominator
    rp, rq = int_nth_root(p, n), int_nth_root(q, n)
    if rp ** n == p and rq ** n == q:
        return Enclosure.exact(Fraction(rp, rq))
    # a = floor( (x * 2**(n*bits)) ** (1/n) ):  (a/2**bits)^n <= x < ((a+1)/2**bits)^n
    a = int_nth_root((p << (n * bits)) // q, n)
    return Enclosure(Fraction(a, 1 << bits), Fraction(a + 1, 1 << bits))


def sqrt_enclosure(x, bits: int = DEFAULT_BITS) -> Enclosure:
    """Certified sqrt of a rational or of an enclosure."""
    if isinstance(x, Enclosure):
        if x.lo < 0:
            raise ValueError("sqrt of a possibly-negative enclosure")
        return Enclosure(nth_root(x.lo, 2, bits).lo, nth_root(x.hi, 2, bits).hi)
    return nth_root(Fraction(x), 2, bits)


def pow_bounds(base: Fraction, n: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """Directed-rounding enclosure of base**n (base >= 0, n >= 0 integer).

    Square-and-multiply on integer mantissas (value ~ m * 2**-bits), with lo
    rounded down and hi rounded up after every step.  Mantissa size tracks the
    magnitude of the value, so this is meant for bases/results of moderate
    size — huge-power inequalities should be phrased with a ratio base < 1.
    """
    base = Fraction(base)
    if base < 0:
        raise ValueError("pow_bounds needs base >= 0")
    if n < 0:
        raise ValueError("pow_bounds needs n >= 0")
    if n == 0:
        return Enclosure.exact(1)
    p, q = base.numerator, base.denominator
    scale = 1 << bits
    mask = scale - 1
    b_lo = (p << bits) // q
    b_hi = -((-p << bits) // q)
    lo, hi = b_lo, b_hi
    for bit in bin(n)[3:]:
        lo = (lo * lo) >> bits
        hi = (hi * hi + mask) >> bits
        if bit == "1":
            lo = (lo * b_lo) >> bits
            hi = (hi * b_hi + mask) >> bits
    return Enclosure(Fraction(lo, scale), Fraction(hi, scale))


def ratio_pow_less(r: Fraction, n: int, c: Fraction, strict: bool = True,
                   bits: int = DEFAULT_BITS, max_bits: int = 1 << 16) -> bool:
    """Certified decision of  r**n < c  (or <= with strict=False), 0 <= r.

    Escalates precision until the enclosure separates; falls back to the
    exact integer comparison when that is feasible.  Intended for ratio bases
    0 < r <= 1 where the mantissas stay small at any exponent.
    """
    r, c = Fraction(r), Fraction(c)
    if _exact_pow_feasible(r, n, 1 << 14):
        rn = r ** n
        return rn < c if strict else rn <= c
    b = bits
    while b <= max_bits:
        enc = pow_bounds(r, n, b)
        if enc.hi < c or (not strict and enc.hi <= c):
            return True
        if enc.lo > c or (strict and enc.lo >= c):
            return False
        b *= 2
    if _exact_pow_feasible(r, n):
        rn = r ** n
        return rn < c if strict else rn <= c
    raise ValueError(
        f"comparison r^{n} vs {c} indeterminate at {max_bits} bits")


def pow_enclosure(base: Enclosure, n: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of base**n when the base itself is an enclosure (base.lo >= 0)."""
    if base.lo < 0:
        raise ValueError("pow_enclosure needs a nonnegative base")
    return Enclosure(pow_bounds(base.lo, n, bits).lo, pow_bounds(base.hi, n, bits).hi)


def _exact_pow_feasible(a: Fraction, n: int, limit_bits: int = 1 << 21) -> bool:
    size = max(a.numerator.bit_length(), a.denominator.bit_length())
    return n * size <= limit_bits


def compare_pow(a: Fraction, n: int, c: Fraction,
                bits: int = DEFAULT_BITS, max_bits: int = MAX_BITS) -> bool:
    """Certified decision of the strict inequality  a**n > c  (a >= 0, n >= 0).

    Tries directed-rounding dyadics with doubling precision; falls back to the
    exact integer comparison when that stays indeterminate or when the exact
    comparison is cheap.  Total and deterministic.
    """
    a = Fraction(a)
    c = Fraction(c)
    if _exact_pow_feasible(a, n, 1 << 14):
        return a ** n > c
    b = bits
    while b <= max_bits:
        enc = pow_bounds(a, n, b)
        if enc.lo > c:
            return True
        if enc.hi <= c:
            return False
        b *= 2
    return a ** n > c


def compare_pow_pow(a: Fraction, na: int, b: Fraction, nb: int, factor: Fraction,
                    bits: int = DEFAULT_BITS, max_bits: int = MAX_BITS) -> bool:
    """Certified decision of  a**na > factor * b**nb  (all quantities >= 0).

    Same escalation scheme as compare_pow; the exact fallback clears
    denominators and compares integers.
    """
    a, b, factor = Fraction(a), Fraction(b), Fraction(factor)
    if _exact_pow_feasible(a, na, 1 << 14) and _exact_pow_feasible(b, nb, 1 << 14):
        return a ** na > factor * b ** nb
    pb = bits
    while pb <= max_bits:
        ea = pow_bounds(a, na, pb)
        eb = pow_bounds(b, nb, pb)
        if ea.lo > factor * eb.hi:
            return True
        if ea.hi <= factor * eb.lo:
            return False
        pb *= 2
    return a ** na > factor * b ** nb


def rat_pow(c: Fraction, t, bits: int = DEFAULT_BITS) -> Enclosure:
    """Certified enclosure of c**t for rational c >= 1 and t >= 0 rational
    or enclosure.  Monotonicity in t does the interval bookkeeping.
    """
    c = Fraction(c)
    if c < 1:
        raise ValueError("rat_pow implemented for c >= 1")
    t = _as_enclosure(t)
    if t.lo < 0:
        raise ValueError("rat_pow needs t >= 0")
    return Enclosure(_rat_pow_one_sided(c, t.lo, bits, lower=True),
                     _rat_pow_one_sided(c, t.hi, bits, lower=False))


def _rat_pow_one_sided(c: Fraction, t: Fraction, bits: int, lower: bool) -> Fraction:
    """One certified bound of c**t (c >= 1, t >= 0 rational)."""
    if t.denominator == 1:
        enc = pow_bounds(c, t.numerator, bits)
        return enc.lo if lower else enc.hi
    k = t.numerator // t.denominator
    frac = t - k  # in [0, 1)
    work = bits + 16
    total = pow_bounds(c, k, work)
    # c**frac via the binary expansion of a dyadic bracket of frac:
    # c**(2**-i) terms come from iterated certified square roots.
    s = work
    m_lo = (frac.numerator << s) // frac.denominator       # m_lo/2**s <= frac
    m_hi = -((-frac.numerator << s) // frac.denominator)   # m_hi/2**s >= frac
    m = m_lo if lower else m_hi
    if m >= (1 << s):  # bracket rounded up to exactly 1
        total = pow_bounds(c, k + 1, work)
        m = 0
    root = Enclosure.exact(c)
    for i in range(1, s + 1):
        if not m:
            break
        root = sqrt_enclosure(root, work).rounded(work)
        if (m >> (s - i)) & 1:
            total = (total * root).rounded(work)
            m &= (1 << (s - i)) - 1
    # c**(m/2**s) computed; for the upper side m/2**s >= frac so this is
    # already an upper bound of c**frac (and conversely for the lower side).
    return total.lo if lower else total.hi


def _tree_sum(terms) -> Fraction:
    """Balanced pairwise Fraction sum (keeps gcd work small for long sums)."""
    items = list(terms)
    if not items:
        return Fraction(0)
    while len(items) > 1:
        items = [items[i] + items[i + 1] if i + 1 < len(items) else items[i]
                 for i in range(0, len(items), 2)]
    return items[0]


def harmonic_number(n: int) -> Fraction:
    """H_n = sum_{k<=n} 1/k, exact."""
    return _tree_sum(Fraction(1, k) for k in range(1, n + 1))


def basel_partial(n: int) -> Fraction:
    """sum_{k<=n} 1/k**2, exact."""
    return _tree_sum(Fraction(1, k * k) for k in range(1, n + 1))
