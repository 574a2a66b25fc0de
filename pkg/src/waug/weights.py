"""Submultiplicative weights (omega >= 1, omega(uv) <= omega(u) omega(v)).

Families:

  trivial       omega = 1
  radial_poly   omega(u) = (1+|u|)^alpha, alpha >= 0 rational
  radial_exp    omega(u) = c^(|u|^beta), c >= 1, 0 < beta <= 1 rational
  lemma74       stepped-exponent weight omega_n = (rho+eps(n))^n on the
                one-letter free monoid (grading n = |u|), eps a positive
                non-increasing staircase; built block-by-block so that the
                norm of delta_(n_k+1) divided by omega_(n_k) stays summable
  lemma76       two-sided weight on Z: omega_n = rho^n gamma_n for n >= 0
                with gamma recursively self-similar, omega_(-n) = C^n omega_n
                where C = max_n omega_n/omega_(n+1)
  explicit      finite value table keyed by the element's canonical string

Radial means the value depends only on the word length w.r.t. the family's
standard generating set.  Evaluations are exact Fractions whenever the
mathematics permits, certified enclosures otherwise.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from fractions import Fraction

from .certify import (DEFAULT_BITS, Enclosure, format_rational, nth_root,
                      parse_rational, pow_bounds, rat_pow, ratio_pow_less)
from .structures import (InvalidInput, ResourceLimit, Structure, UNIVERSE,
                         closed_form_ball_size, division_balls)

EXACT_POW_CAP = 1 << 18  # max exponent for exact big-Fraction powers


class Weight:
    family = "?"
    is_radial = False

    def eval(self, s: Structure, u, bits: int = DEFAULT_BITS):
        raise NotImplementedError

    def radial_value(self, n: int, bits: int = DEFAULT_BITS):
        raise InvalidInput(f"{self.family}: not a radial weight")

    def to_spec(self) -> dict:
        raise NotImplementedError


class TrivialWeight(Weight):
    family = "trivial"
    is_radial = True

    def eval(self, s, u, bits=DEFAULT_BITS):
        return Fraction(1)

    def radial_value(self, n, bits=DEFAULT_BITS):
        return Fraction(1)

    def to_spec(self):
        return {"family": "trivial", "params": {}}


class RadialPolyWeight(Weight):
    """(1 + |u|)^alpha."""

    family = "radial_poly"
    is_radial = True

    def __init__(self, alpha):
        self.alpha = Fraction(alpha)
        if self.alpha < 0:
            raise InvalidInput("radial_poly needs alpha >= 0")

    def eval(self, s, u, bits=DEFAULT_BITS):
        return self.radial_value(s.word_length(u), bits)

    def radial_value(self, n, bits=DEFAULT_BITS):
        p, q = self.alpha.numerator, self.alpha.denominator
        base = 1 + n
        if q == 1:
            return Fraction(base) ** p
        return nth_root(Fraction(base) ** p, q, bits)

    def to_spec(self):
        return {"family": "radial_poly", "params": {"alpha": format_rational(self.alpha)}}


class RadialExpWeight(Weight):
    """c^(|u|^beta) with c >= 1 and 0 < beta <= 1 (so the exponent is
    subadditive and the weight submultiplicative)."""

    family = "radial_exp"
    is_radial = True

    def __init__(self, c, beta=1):
        self.c = Fraction(c)
        self.beta = Fraction(beta)
        if self.c < 1:
            raise InvalidInput("radial_exp needs c >= 1")
        if not (0 < self.beta <= 1):
            raise InvalidInput("radial_exp needs 0 < beta <= 1")

    def eval(self, s, u, bits=DEFAULT_BITS):
        return self.radial_value(s.word_length(u), bits)

    def radial_value(self, n, bits=DEFAULT_BITS):
        if n == 0:
            return Fraction(1)
        p, q = self.beta.numerator, self.beta.denominator
        if q == 1:  # beta == 1
            if n > EXACT_POW_CAP:
                raise ResourceLimit(f"radial_exp value at n={n} is too large to materialize")
            return self.c ** n
        t = nth_root(Fraction(n) ** p, q, bits)
        if t.hi > EXACT_POW_CAP:
            raise ResourceLimit(f"radial_exp value at n={n} is too large to materialize")
        if t.is_exact and t.lo.denominator == 1:
            return self.c ** t.lo.numerator
        return rat_pow(self.c, t, bits)

    def to_spec(self):
        return {"family": "radial_exp",
                "params": {"c": format_rational(self.c), "beta": format_rational(self.beta)}}


class ExplicitWeight(Weight):
    """Finite table elem_str -> value; evaluation outside the table fails."""

    family = "explicit"

    def __init__(self, values: dict):
        self.values = {str(k): parse_rational(v) for k, v in values.items()}
        for k, v in self.values.items():
            if v <= 0:
                raise InvalidInput(f"explicit weight value at {k!r} must be positive")

    def eval(self, s, u, bits=DEFAULT_BITS):
        key = s.elem_str(u)
        if key not in self.values:
            raise InvalidInput(f"explicit weight has no value for element {key!r}")
        return self.values[key]

    def to_spec(self):
        return {"family": "explicit",
                "params": {"values": {k: format_rational(v)
                                      for k, v in sorted(self.values.items())}}}


class Lemma74Weight(Weight):
    """omega_n = (rho + eps(n))^n on the one-letter free monoid.

    eps(n) = eps_k for n_k < n <= n_(k+1) (eps_0 up to n_1, eps_K beyond n_K).
    Values for large n are astronomically big; radial_value materializes them
    only up to EXACT_POW_CAP and callers needing large-index information use
    the ratio helpers instead.
    """

    family = "lemma74"
    is_radial = True

    def __init__(self, rho, blocks, markers, eps):
        self.rho = Fraction(rho)
        self.blocks = blocks
        self.markers = list(markers)   # n_1 < n_2 < ... < n_K
        self.eps = [Fraction(e) for e in eps]  # eps_0 .. eps_K
        if len(self.markers) != blocks or len(self.eps) != blocks + 1:
            raise InvalidInput("lemma74 weight: inconsistent block data")

    def eps_at(self, n: int) -> Fraction:
        if n < 0:
            raise InvalidInput("lemma74 weight is graded by n >= 0")
        return self.eps[bisect_left(self.markers, n)]

    def base_at(self, n: int) -> Fraction:
        return self.rho + self.eps_at(n)

    def eval(self, s, u, bits=DEFAULT_BITS):
        return self.radial_value(s.word_length(u), bits)

    def radial_value(self, n, bits=DEFAULT_BITS):
        if n > EXACT_POW_CAP:
            raise ResourceLimit(
                f"lemma74 weight value at n={n} is too large to materialize; "
                "use the ratio certificates instead")
        return self.base_at(n) ** n

    def step_ratio(self, k: int, bits: int = DEFAULT_BITS):
        """omega_(n_k+1) / omega_(n_k) as a Fraction (exact when feasible)
        or a certified Enclosure; this is the quantity bounded by
        (rho+1)/k."""
        nk = self.markers[k - 1]
        A = self.rho + self.eps[k - 1]   # base on block ending at n_k
        B = self.rho + self.eps[k]       # base from n_k + 1 on
        # exact only while cheap: the division of two exact powers costs a
        # gcd on ~nk*log2(k)-bit integers, which dominates everything once
        # nk reaches ~1e4
        if (nk + 1) * (A.numerator.bit_length() + B.numerator.bit_length()) <= (1 << 13):
            return B ** (nk + 1) / A ** nk
        enc = pow_bounds(B / A, nk, bits)
        return Enclosure(enc.lo * B, enc.hi * B)

    def to_spec(self):
        return {"family": "lemma74",
                "params": {"rho": format_rational(self.rho), "blocks": self.blocks}}


class Lemma76Weight(Weight):
    """Two-sided weight on Z built from the self-similar gamma table."""

    family = "lemma76"
    is_radial = False

    def __init__(self, rho, N, gamma, C):
        self.rho = Fraction(rho)
        self.N = N
        self.gamma = [Fraction(g) for g in gamma]  # gamma_0 .. gamma_N
        self.C = Fraction(C)

    def omega_pos(self, n: int) -> Fraction:
        return self.rho ** n * self.gamma[n]

    def eval(self, s, u, bits=DEFAULT_BITS):
        if not isinstance(u, int):
            raise InvalidInput("lemma76 weight lives on Z")
        n = abs(u)
        if n > self.N:
            raise InvalidInput(f"lemma76 weight table only reaches |n| <= {self.N}")
        w = self.omega_pos(n)
        return w if u >= 0 else self.C ** n * w

    def to_spec(self):
        return {"family": "lemma76",
                "params": {"rho": format_rational(self.rho), "N": self.N}}


WEIGHT_FAMILIES = ("trivial", "radial_poly", "radial_exp", "explicit",
                   "lemma74", "lemma76")


def weight_from_spec(spec: dict) -> Weight:
    if not isinstance(spec, dict):
        raise InvalidInput("weight spec must be a JSON object")
    family = spec.get("family")
    params = spec.get("params", {}) or {}
    if family == "trivial":
        return TrivialWeight()
    if family == "radial_poly":
        return RadialPolyWeight(parse_rational(params.get("alpha", 0)))
    if family == "radial_exp":
        return RadialExpWeight(parse_rational(params.get("c", 1)),
                               parse_rational(params.get("beta", 1)))
    if family == "explicit":
        if "values" not in params:
            raise InvalidInput("explicit weight needs params.values")
        return ExplicitWeight(params["values"])
    if family == "lemma74":
        if "rho" not in params or "blocks" not in params:
            raise InvalidInput("lemma74 weight needs params.rho and params.blocks")
        w, _ = build_lemma74(parse_rational(params["rho"]), int(params["blocks"]))
        return w
    if family == "lemma76":
        if "rho" not in params or "N" not in params:
            raise InvalidInput("lemma76 weight needs params.rho and params.N")
        w, _ = build_lemma76(parse_rational(params["rho"]), int(params["N"]))
        return w
    raise InvalidInput(f"unknown weight family {family!r}")


# ---------------------------------------------------------------------------
# axiom verification
# ---------------------------------------------------------------------------

def verify_weight_axioms(s: Structure, gens, weight: Weight, radius: int,
                         bits: int = DEFAULT_BITS, cap=None) -> dict:
    """Check omega(e) = 1, omega >= 1, omega(uv) <= omega(u) omega(v).

    Enumerates pairs from B_radius for explicit weights; uses exact
    length-pair checks for radial weights (the value depends only on |u|,
    and |uv| <= |u| + |v|); and uses the recorded structural certificates
    for the lemma74/lemma76 constructions, whose interesting indices are far
    beyond anything enumerable.
    """
    report = {"ok": True, "method": None, "radius": radius,
              "pairs_checked": 0, "failures": [], "notes": []}

    def fail(**kw):
        report["ok"] = False
        if len(report["failures"]) < 10:
            report["failures"].append(kw)

    if isinstance(weight, TrivialWeight):
        report["method"] = "structural"
        report["notes"].append("constant weight 1: all axioms are identities")
        return report

    if isinstance(weight, Lemma74Weight):
        report["method"] = "structural"
        eps = weight.eps
        if any(e <= 0 for e in eps):
            fail(axiom="omega>=1", detail="eps staircase not positive")
        if any(eps[i + 1] > eps[i] for i in range(len(eps) - 1)):
            fail(axiom="submultiplicative", detail="eps staircase increases")
        if weight.rho < 1:
            fail(axiom="omega>=1", detail="rho < 1")
        report["notes"].append(
            "omega_(m+n) = (rho+eps(m+n))^m (rho+eps(m+n))^n <= "
            "(rho+eps(m))^m (rho+eps(n))^n since eps is non-increasing; "
            "omega_n >= rho^n >= 1; omega_0 = 1; valid for ALL m, n")
        report["pairs_checked"] = len(eps) - 1
        return report

    if isinstance(weight, Lemma76Weight):
        return _verify_lemma76_axioms(weight, radius, report)

    if weight.is_radial:
        # value = F(|u|); |uv| <= |u|+|v| and F is checked submultiplicative
        # on the integer lengths, which covers every pair from B_radius.
        report["method"] = "radial-lengths"
        if weight.radial_value(0) != 1:
            fail(axiom="omega(e)=1", detail=str(weight.radial_value(0)))
        sub_one = None
        for n in range(0, radius + 1):
            v = weight.radial_value(n, bits)
            lo = v.lo if isinstance(v, Enclosure) else v
            if lo < 1:
                sub_one = n
                break
        if sub_one is not None:
            fail(axiom="omega>=1", n=sub_one)
        pairs = 0
        for m in range(1, radius + 1):
            for n in range(m, radius + 1):
                if m + n > radius:
                    break
                ok = _radial_submult_pair(weight, m, n, bits)
                pairs += 1
                if not ok:
                    fail(axiom="submultiplicative", m=m, n=n)
        report["pairs_checked"] = pairs
        return report

    # explicit table: enumerate
    report["method"] = "enumeration"
    bt = division_balls(s, gens, radius, cap)
    if bt.balls[-1] is UNIVERSE:
        raise ResourceLimit("cannot enumerate pairs from a universal ball")
    elems = sorted(bt.balls[-1], key=s.elem_key)
    we = weight.eval(s, s.identity(), bits)
    if we != 1:
        fail(axiom="omega(e)=1", value=format_rational(we))
    vals = {}
    for u in elems:
        try:
            vals[u] = weight.eval(s, u, bits)
        except InvalidInput:
            report["notes"].append(f"no value for {s.elem_str(u)}; skipped")
    for u, wu in vals.items():
        if wu < 1:
            fail(axiom="omega>=1", elem=s.elem_str(u))
    pairs = 0
    for u, wu in vals.items():
        for v, wv in vals.items():
            w = s.multiply(u, v)
            if w not in vals:
                continue
            pairs += 1
            if vals[w] > wu * wv:
                fail(axiom="submultiplicative", u=s.elem_str(u), v=s.elem_str(v),
                     lhs=format_rational(vals[w]), rhs=format_rational(wu * wv))
    report["pairs_checked"] = pairs
    return report


def _radial_submult_pair(weight, m, n, bits) -> bool:
    """Certified F(m+n) <= F(m) F(n) for a radial weight."""
    if isinstance(weight, RadialPolyWeight):
        # (1+m+n)^alpha <= ((1+m)(1+n))^alpha <=> 1+m+n <= (1+m)(1+n): exact
        return 1 + m + n <= (1 + m) * (1 + n)
    if isinstance(weight, RadialExpWeight):
        p, q = weight.beta.numerator, weight.beta.denominator
        if q == 1:
            return True  # exponent additive
        # need (m+n)^beta <= m^beta + n^beta; certify with escalation
        b = bits
        while b <= (1 << 14):
            tm = nth_root(Fraction(m) ** p, q, b)
            tn = nth_root(Fraction(n) ** p, q, b)
            ts = nth_root(Fraction(m + n) ** p, q, b)
            if ts.hi <= tm.lo + tn.lo:
                return True
            if ts.lo > tm.hi + tn.hi:
                return False
            b *= 2
        raise ResourceLimit(f"radial_exp submultiplicativity at ({m},{n}) indeterminate")
    # generic radial: compare values/enclosures with escalation
    b = bits
    while b <= (1 << 14):
        fm = weight.radial_value(m, b)
        fn = weight.radial_value(n, b)
        fs = weight.radial_value(m + n, b)
        fm = fm if isinstance(fm, Enclosure) else Enclosure.exact(fm)
        fn = fn if isinstance(fn, Enclosure) else Enclosure.exact(fn)
        fs = fs if isinstance(fs, Enclosure) else Enclosure.exact(fs)
        prod = fm * fn
        if fs.hi <= prod.lo:
            return True
        if fs.lo > prod.hi:
            return False
        if fs.is_exact and prod.is_exact:
            return fs.lo <= prod.lo
        b *= 2
    raise ResourceLimit(f"radial submultiplicativity at ({m},{n}) indeterminate")


def _verify_lemma76_axioms(weight: Lemma76Weight, radius: int, report: dict) -> dict:
    """gamma-table checks plus the ratio-chain argument for mixed signs."""
    report["method"] = "table+structural"
    N = min(radius, weight.N)
    g = weight.gamma
    rho = weight.rho

    def fail(**kw):
        report["ok"] = False
        if len(report["failures"]) < 10:
            report["failures"].append(kw)

    if g[0] != 1:
        fail(axiom="omega(e)=1", value=format_rational(g[0]))
    pairs = 0
    for i in range(0, N + 1):
        if g[i] < 1:
            fail(axiom="gamma>=1", n=i)
            break
    for i in range(1, N + 1):
        for j in range(i, N + 1 - i):
            pairs += 1
            if g[i + j] > g[i] * g[j]:
                fail(axiom="gamma-submultiplicative", i=i, j=j)
    # omega_n/omega_(n+1) <= C by construction; record the premise for the
    # mixed-sign chain omega_(m-n) <= C^n omega_m <= omega_m omega_(-n).
    bad = [n for n in range(0, N) if g[n] > weight.C * rho * g[n + 1]]
    if bad:
        fail(axiom="ratio-premise", n=bad[0])
    if weight.C < 1:
        fail(axiom="omega>=1 (negative side)", detail="C < 1")
    report["pairs_checked"] = pairs
    report["notes"].append(
        "positive side: omega_(i+j) <= omega_i omega_j iff gamma_(i+j) <= "
        "gamma_i gamma_j (rho^n cancels); negative and mixed signs follow "
        "from the chain omega_j <= C omega_(j+1) and omega >= 1")
    return report


# ---------------------------------------------------------------------------
# sphere minima and generator maximum
# ---------------------------------------------------------------------------

def tau_and_C(s: Structure, gens, weight: Weight, N: int,
              bits: int = DEFAULT_BITS, cap=None) -> dict:
    """tau_n = min over the sphere S_n of omega, for n = 1..N, plus
    C = max over the generators of omega.  Exact Fractions required (use
    integer alpha / beta = 1 radial weights, or table weights)."""
    radial_fast = (weight.is_radial and s.is_standard_generators(gens)
                   and s.size is None
                   and closed_form_ball_size(s, gens, 1) is not None)
    taus = []
    sphere_sizes = []
    method = "radial" if radial_fast else "enumeration"
    if radial_fast:
        for n in range(1, N + 1):
            v = weight.radial_value(n, bits)
            if isinstance(v, Enclosure):
                raise InvalidInput(
                    "tau_and_C needs exact weight values (integer alpha or beta=1)")
            taus.append(v)
            sphere_sizes.append(closed_form_ball_size(s, gens, n)
                                - closed_form_ball_size(s, gens, n - 1))
    else:
        bt = division_balls(s, gens, N, cap)
        for n in range(1, N + 1):
            lev = bt.levels[n]
            if lev is UNIVERSE:
                raise ResourceLimit("sphere minima over a universal sphere")
            if not lev:
                raise InvalidInput(
                    f"sphere S_{n} is empty; tau is undefined past the "
                    f"stabilization depth (ball sizes {bt.sizes()})")
            vals = [weight.eval(s, u, bits) for u in lev]
            if any(isinstance(v, Enclosure) for v in vals):
                raise InvalidInput(
                    "tau_and_C needs exact weight values (integer alpha or beta=1)")
            taus.append(min(vals))
            sphere_sizes.append(len(lev))
    cvals = [weight.eval(s, x, bits) for x in gens]
    if any(isinstance(v, Enclosure) for v in cvals):
        raise InvalidInput("tau_and_C needs exact weight values on the generators")
    return {"taus": taus, "C": max(cvals), "sphere_sizes": sphere_sizes,
            "N": N, "method": method}


def tau_step_check(taus, C) -> dict:
    """tau_n <= C tau_(n+1) for all n (the sphere-minima Lipschitz bound)."""
    bad = [n + 1 for n in range(len(taus) - 1) if taus[n] > C * taus[n + 1]]
    return {"ok": not bad, "violations": bad, "C": C, "N": len(taus)}


def estimate_radii(s: Structure, weight: Weight, N: int,
                   bits: int = DEFAULT_BITS) -> dict:
    """Running root estimates for the convergence annulus at horizon N.

    rho2_hat = min_{1<=n<=N} omega(n)^(1/n)  (outer radius estimate);
    for two-sided weights on Z also rho1_hat = max_n omega(-n)^(-1/n).
    Both are certified enclosures of the finite-horizon min/max.
    """
    if N < 1:
        raise InvalidInput("estimate_radii needs N >= 1")

    def root_enc(value, n):
        if isinstance(value, Enclosure):
            return Enclosure(nth_root(value.lo, n, bits).lo,
                             nth_root(value.hi, n, bits).hi)
        return nth_root(value, n, bits)

    pos = []
    for n in range(1, N + 1):
        if weight.is_radial:
            v = weight.radial_value(n, bits)
        else:
            v = weight.eval(s, n, bits)
        pos.append(root_enc(v, n))
    rho2 = Enclosure(min(e.lo for e in pos), min(e.hi for e in pos))
    out = {"N": N, "rho2_hat": rho2, "per_n_pos": pos}
    if s.family == "Z":
        neg = []
        for n in range(1, N + 1):
            try:
                v = weight.eval(s, -n, bits)
            except InvalidInput:
                break
            r = root_enc(v, n)
            neg.append(Enclosure(1 / r.hi, 1 / r.lo))
        if len(neg) == N:
            out["rho1_hat"] = Enclosure(max(e.lo for e in neg), max(e.hi for e in neg))
            out["per_n_neg"] = neg
    return out


# ---------------------------------------------------------------------------
# Stepped-exponent weight builder: summable step ratios by construction
# ---------------------------------------------------------------------------

def _lemma74_predicate(A: Fraction, B: Fraction, n: int, bits: int) -> bool:
    """Certified  A^n > n B^n,  i.e.  (B/A)^n < 1/n."""
    return ratio_pow_less(B / A, n, Fraction(1, n), strict=True, bits=bits)


def _float_block_estimate(A: Fraction, B: Fraction, lo: int) -> int:
    """Float guess for the least n with (A/B)^n > n (accelerator only).

    log(A/B) is computed as log1p((A-B)/B); the naive difference of two
    logs near log(rho) cancels catastrophically once A/B - 1 ~ 1/k^2,
    and a relative error in the rate becomes an absolute error of the
    same relative size in n (hundreds at n ~ 1e9).
    """
    lr = math.log1p(float((A - B) / B))
    if lr <= 0:
        return lo + 1
    x = max(lo + 1.0, 2.0)
    for _ in range(64):
        nxt = max(lo + 1.0, math.log(x) / lr)
        if abs(nxt - x) < 0.5:
            x = nxt
            break
        x = nxt
    return max(lo + 1, int(x) - 8)


def build_lemma74(rho, K: int, bits: int = DEFAULT_BITS):
    """Construct the stepped-exponent weight with K blocks.

    eps_0 = 1, eps_k = 1/(k+1); n_1 = 1 and for k >= 2, n_k is the least
    integer above n_(k-1) with  (rho+eps_(k-1))^n > n (rho+eps_k)^n.  Each
    block then satisfies the step-ratio bound
        omega_(n_k+1)/omega_(n_k) <= (rho+1)/k,
    which is certified per block (exactly when the numbers are materializable,
    by directed-rounding dyadics beyond that).

    Returns (Lemma74Weight, report).
    """
    rho = Fraction(rho)
    if rho <= 1:
        raise InvalidInput("build_lemma74 needs rho > 1")
    if K < 1:
        raise InvalidInput("build_lemma74 needs K >= 1")
    eps = [Fraction(1)] + [Fraction(1, k + 1) for k in range(1, K + 1)]
    markers = [1]
    # n_1 = 1: the defining inequality at n = 1 is (rho+1)^1 > 1*(rho+1/2)^1, exact.
    assert rho + eps[0] > 1 * (rho + eps[1])
    for k in range(2, K + 1):
        A = rho + eps[k - 1]
        B = rho + eps[k]
        lo = markers[-1]
        n = _float_block_estimate(A, B, lo)
        # bracket [lo_search, hi] with the predicate false at lo_search (or
        # lo_search == lo) and true at hi, by galloping from the float guess;
        # the predicate is monotone in n past n = 1 because A/B <= 9/8 <
        # sqrt(2) for rho >= 1, k >= 2, so bisection finds the least true n
        if _lemma74_predicate(A, B, n, bits):
            hi, step = n, 1
            while hi - step > lo and _lemma74_predicate(A, B, hi - step, bits):
                hi -= step
                step *= 2
            lo_search = max(lo, hi - step)
        else:
            step = 1
            while not _lemma74_predicate(A, B, n + step, bits):
                step *= 2
                if step > (1 << 40):
                    raise ResourceLimit("lemma74 block search diverged")
            hi = n + step
            lo_search = n + step // 2 if step > 1 else n
        while hi - lo_search > 1:
            mid = (hi + lo_search) // 2
            if _lemma74_predicate(A, B, mid, bits):
                hi = mid
            else:
                lo_search = mid
        markers.append(hi)
    weight = Lemma74Weight(rho, K, markers, eps)
    # per-block step-ratio certificates:  k omega_(n_k+1) <= (rho+1) omega_(n_k)
    step_bounds = []
    for k in range(1, K + 1):
        nk = markers[k - 1]
        A = rho + eps[k - 1]
        B = rho + eps[k]
        # exact only while the materialized powers stay small: a Fraction
        # comparison cross-multiplies ~nk*log2(k)-bit integers, which is the
        # entire runtime once nk reaches ~1e5
        if nk * (A.numerator.bit_length() + B.numerator.bit_length()) <= (1 << 13):
            ok = Fraction(k) * B ** (nk + 1) <= (rho + 1) * A ** nk
            method = "exact"
        else:
            # k B^(nk+1) <= (rho+1) A^nk  <=>  (B/A)^nk <= (rho+1)/(k B)
            ok = ratio_pow_less(B / A, nk, (rho + 1) / (Fraction(k) * B),
                                strict=False, bits=bits)
            method = "certified-dyadic"
        step_bounds.append({"k": k, "n_k": nk, "ok": ok, "method": method})
    report = {
        "rho": rho,
        "blocks": K,
        "markers": markers,
        "eps": eps,
        "eps_monotone": all(eps[i + 1] <= eps[i] for i in range(K)),
        "eps_below_1_over_k": all(eps[k] < Fraction(1, k) for k in range(1, K + 1)),
        "step_bounds": step_bounds,
        "step_bounds_all_ok": all(c["ok"] for c in step_bounds),
        "top_index": markers[-1] + 1,
    }
    return weight, report


# ---------------------------------------------------------------------------
# Self-similar weight builder: gamma table on Z with a mirrored negative side
# ---------------------------------------------------------------------------

def build_lemma76(rho, N: int):
    """gamma_0 = 1, gamma_1 = rho+1, gamma_2 = (rho+1)^2, and
    gamma_j = (rho+1) gamma_(j - n_k) for n_k <= j < n_(k+1), n_k = 2^k - 1.

    omega_n = rho^n gamma_n for 0 <= n <= N; omega_(-n) = C^n omega_n with
    C = max_{0<=n<N} omega_n/omega_(n+1).

    Verifies exactly, for the whole table:
      (star)    gamma_(n_k - i) = (rho+1)^(i+1) for 0 <= i <= k-1, k >= 2
      (dagger)  gamma_j <= (rho+1) gamma_(j+1)
      submult   gamma_(i+j) <= gamma_i gamma_j  for all i + j <= N
      ratio     omega_(n_k) / sum_(j<n_k) omega_j <= (rho/(rho+1))^(k-1), k >= 2

    Returns (Lemma76Weight, report).
    """
    rho = Fraction(rho)
    if rho <= 1:
        raise InvalidInput("build_lemma76 needs rho > 1")
    if N < 1:
        raise InvalidInput("build_lemma76 needs N >= 1")
    r1 = rho + 1
    markers = []
    k = 1
    while (1 << k) - 1 <= N:
        markers.append((1 << k) - 1)
        k += 1
    gamma = [Fraction(1), r1, r1 * r1]
    for j in range(3, N + 1):
        i = bisect_left(markers, j + 1) - 1  # largest k with n_k <= j
        nk = markers[i]
        gamma.append(r1 * gamma[j - nk])
    gamma = gamma[:N + 1]

    star_ok = True
    star_fail = None
    for idx, nk in enumerate(markers, start=1):
        if idx < 2 or nk > N:
            continue
        for i in range(0, idx):
            if gamma[nk - i] != r1 ** (i + 1):
                star_ok = False
                star_fail = {"k": idx, "i": i}
                break
        if not star_ok:
            break
    dagger_bad = [j for j in range(0, N) if gamma[j] > r1 * gamma[j + 1]]
    sub_bad = None
    for i in range(1, N + 1):
        gi = gamma[i]
        for j in range(i, N + 1 - i):
            if gamma[i + j] > gi * gamma[j]:
                sub_bad = (i, j)
                break
        if sub_bad:
            break

    omega = [rho ** n * gamma[n] for n in range(N + 1)]
    ratios = []
    ratio_ok = True
    for idx, nk in enumerate(markers, start=1):
        if idx < 2:
            continue
        total = sum(omega[j] for j in range(1, nk))
        val = omega[nk] / total
        bound = (rho / r1) ** (idx - 1)
        ratios.append({"k": idx, "n_k": nk, "ratio": val, "bound": bound,
                       "ok": val <= bound})
        ratio_ok = ratio_ok and val <= bound
    C = max(omega[n] / omega[n + 1] for n in range(N)) if N >= 1 else Fraction(1)
    weight = Lemma76Weight(rho, N, gamma, C)
    report = {
        "rho": rho,
        "N": N,
        "markers": markers,
        "star_ok": star_ok,
        "star_failure": star_fail,
        "dagger_ok": not dagger_bad,
        "dagger_violations": dagger_bad[:5],
        "submult_ok": sub_bad is None,
        "submult_failure": sub_bad,
        "ratio_checks": ratios,
        "ratio_all_ok": ratio_ok,
        "C": C,
    }
    return weight, report
