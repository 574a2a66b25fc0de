"""Tail-preservation analysis of positive sequences over a finite prefix.

For tau_1..tau_N (all >= 1) and a finitely supported rational vector x,

    ||x||_tau = sum_n tau_n |x_n|,
    T(x)      = sum_n tau_n |sum_{j>n} x_j|.

The exact prefix invariant is D_hat = min_{1<=n<N} tau_(n+1) / sum_{j<=n} tau_j:
for non-negative x the norm dominates D_hat * T(x), so a large T against a
unit-norm x witnesses a collapsing D_hat.  Whether the *infinite* sequence is
tail-preserving is not decidable from a prefix; the classification emitted
here is a labeled heuristic, while D_hat, T and the witnesses are exact.
"""

from __future__ import annotations

from fractions import Fraction

from .certify import format_rational, parse_rational
from .structures import InvalidInput


class PrefixSequence:
    """tau_1..tau_N, exact rationals, all >= 1, N >= 2."""

    def __init__(self, values):
        vals = [Fraction(v) for v in values]
        if len(vals) < 2:
            raise InvalidInput("prefix sequence needs N >= 2")
        for i, v in enumerate(vals, start=1):
            if v < 1:
                raise InvalidInput(f"tau_{i} = {v} < 1")
        self.values = vals

    @property
    def N(self):
        return len(self.values)

    def tau(self, n: int) -> Fraction:
        if not 1 <= n <= self.N:
            raise InvalidInput(f"index {n} outside 1..{self.N}")
        return self.values[n - 1]

    def prefix_sums(self):
        """P_n = sum_{j<=n} tau_j for n = 0..N (P_0 = 0)."""
        sums = [Fraction(0)]
        for v in self.values:
            sums.append(sums[-1] + v)
        return sums

    def to_csv_rows(self):
        return [(n, self.values[n - 1].numerator, self.values[n - 1].denominator)
                for n in range(1, self.N + 1)]

    @classmethod
    def from_csv_rows(cls, rows):
        vals = {}
        for row in rows:
            try:
                n, num, den = int(row[0]), int(row[1]), int(row[2])
            except (ValueError, IndexError) as exc:
                raise InvalidInput(f"bad sequence CSV row {row!r}") from exc
            if den == 0:
                raise InvalidInput(f"zero denominator at index {n}")
            vals[n] = Fraction(num, den)
        if sorted(vals) != list(range(1, len(vals) + 1)):
            raise InvalidInput("sequence CSV indices must be 1..N without gaps")
        return cls([vals[n] for n in range(1, len(vals) + 1)])


def norm_tau(seq: PrefixSequence, x: dict) -> Fraction:
    """||x||_tau for x given as {index: rational}."""
    total = Fraction(0)
    for j, v in x.items():
        total += seq.tau(j) * abs(Fraction(v))
    return total


def tail_functional(seq: PrefixSequence, x: dict) -> Fraction:
    """T(x) = sum_{n=1}^{N} tau_n |sum_{j>n} x_j|, exact."""
    if not x:
        return Fraction(0)
    for j in x:
        if not 1 <= j <= seq.N:
            raise InvalidInput(f"support index {j} outside 1..{seq.N}")
    top = max(x)
    # tail_n only changes while n < top; beyond it everything is zero
    total = Fraction(0)
    tail = Fraction(0)
    tails = {}
    for n in range(top, 0, -1):
        # tail after n is sum_{j>n}; build downward
        tails[n] = tail
        tail += Fraction(x.get(n, 0))
    for n in range(1, top):
        t = tails[n]
        if t:
            total += seq.tau(n) * abs(t)
    return total


def check_prefix_tp(seq: PrefixSequence, threshold=Fraction(1, 1000),
                    window: int = 10, decay=Fraction(19, 20)) -> dict:
    """Exact per-n ratios and D_hat, plus the labeled heuristic classification.

    suspect-fail iff the final-quartile minimum ratio drops below `threshold`,
    or the last `window` ratios are strictly decreasing and lose at least a
    1 - `decay` fraction over that stretch.  (A strict decrease alone proves
    nothing: ratios of genuinely tail-preserving sequences such as c^n
    decrease towards a positive limit.)
    """
    P = seq.prefix_sums()
    ratios = [seq.values[n] / P[n] for n in range(1, seq.N)]  # n = 1..N-1
    d_hat = min(ratios)
    argmin = ratios.index(d_hat) + 1
    quart = ratios[-(max(1, len(ratios) // 4)):]
    suspect = min(quart) < threshold
    if not suspect and len(ratios) >= window:
        lastw = ratios[-window:]
        decreasing = all(b < a for a, b in zip(lastw, lastw[1:]))
        if decreasing and lastw[-1] < decay * lastw[0]:
            suspect = True
    return {
        "N": seq.N,
        "D_hat": d_hat,
        "argmin_n": argmin,
        "ratios": ratios,
        "classification": "suspect-fail" if suspect else "prefix-consistent",
        "heuristic": {
            "kind": "semi-decision; prefix data cannot prove tail-preservation",
            "threshold": threshold,
            "window": window,
            "decay": decay,
        },
    }


def failure_witness(seq: PrefixSequence, target) -> dict:
    """Search canonical candidates for ||x||_tau <= 1 with T(x) >= target.

    Candidates, in order: single coordinates x = e^(j)/tau_j (j ascending;
    T = sum_{i<j} tau_i / tau_j), then uniform blocks on [a..b] normalized to
    norm 1 (b ascending, a descending).  Returns the first hit; not-found is
    not a proof of tail-preservation (the prefix may just be short).
    """
    target = parse_rational(target)
    if target <= 0:
        raise InvalidInput("failure_witness needs target > 0")
    P = seq.prefix_sums()
    for j in range(1, seq.N + 1):
        tval = P[j - 1] / seq.values[j - 1]
        if tval >= target:
            x = {j: Fraction(1) / seq.values[j - 1]}
            return {"found": True, "kind": "single", "x": x,
                    "norm": norm_tau(seq, x), "T": tail_functional(seq, x),
                    "target": target}
    for b in range(2, seq.N + 1):
        for a in range(b - 1, 0, -1):
            c = Fraction(1) / (P[b] - P[a - 1])
            x = {j: c for j in range(a, b + 1)}
            tval = tail_functional(seq, x)
            if tval >= target:
                return {"found": True, "kind": "block", "x": x,
                        "norm": norm_tau(seq, x), "T": tval, "target": target}
    return {"found": False, "target": target,
            "note": "no witness within this prefix; not a proof of tail-preservation"}


def growth_check(seq: PrefixSequence, D) -> dict:
    """Check the growth premise tau_(n+1) >= D sum_{j<=n} tau_j on the prefix, and the
    growth bound it implies: tau_(j+1) >= D (D+1)^(j-1) tau_1."""
    D = parse_rational(D)
    if D <= 0:
        raise InvalidInput("growth_check needs D > 0")
    P = seq.prefix_sums()
    hyp_fail = None
    for n in range(1, seq.N):
        if seq.values[n] < D * P[n]:
            hyp_fail = n + 1  # index of the violating tau
            break
    concl_fail = None
    power = Fraction(1)  # (D+1)^(j-1)
    for j in range(1, seq.N):
        if seq.values[j] < D * power * seq.values[0]:
            concl_fail = j + 1
            break
        power *= (D + 1)
    return {
        "D": D,
        "N": seq.N,
        "hypothesis_ok": hyp_fail is None,
        "hypothesis_first_failure": hyp_fail,
        "conclusion_ok": concl_fail is None,
        "conclusion_first_failure": concl_fail,
    }


def build_block_sequence(rho, K: int) -> dict:
    """The staircase witness sequence: markers n_1 = 1, n_k = n_(k-1) + k + 1,
    and tau_j = rho^(n_k+1) on the k-th block n_(k-1)+1 < j <= n_k+1 (block 1
    starts at j = 1, so tau_1 = tau_2 = rho^2).

    Every tau_j >= rho^j, and the boundary ratios
    tau_(n_k+1) / sum_{j<=n_k} tau_j are exactly <= 1/k: above the boundary
    sit k copies of rho^(n_k+1) from the same block.  Both facts are verified
    exactly and returned with the sequence.
    """
    rho = parse_rational(rho)
    if rho <= 1:
        raise InvalidInput("build_block_sequence needs rho > 1")
    if K < 2:
        raise InvalidInput("build_block_sequence needs K >= 2")
    markers = [1]
    for k in range(2, K + 1):
        markers.append(markers[-1] + k + 1)
    values = []
    prev_end = 0  # n_(k-1)+1 for block 1 with the n_0 = -1 convention
    for k, nk in enumerate(markers, start=1):
        block_val = rho ** (nk + 1)
        start = prev_end + 1
        end = nk + 1
        values.extend([block_val] * (end - start + 1))
        prev_end = end
    seq = PrefixSequence(values)
    geq = all(values[j - 1] >= rho ** j for j in range(1, len(values) + 1))
    P = seq.prefix_sums()
    boundary = []
    all_ok = True
    for k, nk in enumerate(markers, start=1):
        ratio = seq.values[nk] / P[nk]  # tau_(n_k+1) / sum_{j<=n_k}
        ok = ratio <= Fraction(1, k)
        all_ok = all_ok and ok
        boundary.append({"k": k, "n_k": nk, "ratio": ratio,
                         "bound": Fraction(1, k), "ok": ok})
    return {
        "rho": rho,
        "K": K,
        "markers": markers,
        "sequence": seq,
        "tau_geq_rho_pow_j": geq,
        "boundary_ratios": boundary,
        "boundary_all_ok": all_ok,
    }


def vector_to_json(x: dict) -> list:
    return [{"n": j, "value": format_rational(Fraction(v))}
            for j, v in sorted(x.items())]


def vector_from_json(obj) -> dict:
    out = {}
    for item in obj:
        out[int(item["n"])] = parse_rational(item["value"])
    return out
