"""Finitely generated groups and monoids with set-valued division.

Families and element encodings:

  Z               integers; element = int
  Zd              Z^d; element = tuple of d ints
  free            free group (inverses=true) or free monoid (inverses=false)
                  on `rank` generators; element = tuple of nonzero signed
                  1-based generator indices, negative meaning inverse;
                  group words are kept reduced
  table           finite monoid given by a row-major multiplication table;
                  element = index, 0 is the identity
  zero_adjoined   free monoid on `rank` letters with an adjoined absorbing
                  zero; element = word tuple or the string "theta"

Division is set-valued:  E . x^-1 = {u : u x in E}.  On the zero-adjoined
monoid the set {u : u theta = theta} is the whole (infinite) monoid; such
results are represented by the UNIVERSE token instead of being enumerated.
Because of that token the two bracketings (E . x^-1) . y and E . (x^-1 y ...)
genuinely differ here, as they must.

Balls use the division-closure recursion
    B_0 = {e},   B_n = B_(n-1)  u  U_x B_(n-1).x  u  U_x B_(n-1).x^-1
and spheres are S_n = B_n \\ B_(n-1).  Every deterministic choice ("least"
element, term order) is made against elem_key, a canonical total order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

from .certify import InvalidInput, ResourceLimit  # noqa: F401  (re-exported)

BALL_CAP_ENV = "WAUG_BALL_CAP"
BALL_CAP_DEFAULT = 10 ** 6

THETA = "theta"  # adjoined zero; words are tuples, so no collision


def ball_cap() -> int:
    raw = os.environ.get(BALL_CAP_ENV)
    if raw is None:
        return BALL_CAP_DEFAULT
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InvalidInput(f"{BALL_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise InvalidInput(f"{BALL_CAP_ENV} must be positive")
    return cap


class _Universe:
    """Token standing for 'the whole monoid' in set computations."""

    def __repr__(self):
        return "UNIVERSE"


UNIVERSE = _Universe()


def set_contains(E, u) -> bool:
    return True if E is UNIVERSE else (u in E)


# ---------------------------------------------------------------------------
# structure families
# ---------------------------------------------------------------------------

class Structure:
    family = "?"
    is_group = False
    size: Optional[int] = None  # None = infinite

    def identity(self):
        raise NotImplementedError

    def multiply(self, u, v):
        raise NotImplementedError

    def invert(self, u):
        raise InvalidInput(f"{self.family}: not a group, no inverses")

    def default_generators(self):
        raise InvalidInput(f"{self.family}: generators must be given explicitly")

    def elem_key(self, u):
        """Canonical total-order key; ties everywhere break through this."""
        raise NotImplementedError

    def word_length(self, u) -> int:
        """Length w.r.t. the family's standard generating set."""
        raise InvalidInput(f"{self.family}: no standard word length")

    def is_standard_generators(self, gens) -> bool:
        return False

    def right_divide_point(self, u, x):
        """{v : v x = u} as a frozenset (or UNIVERSE)."""
        raise NotImplementedError

    def mult_set(self, E, x):
        if E is UNIVERSE:
            raise ResourceLimit(
                f"{self.family}: cannot multiply the universal set by an element")
        return frozenset(self.multiply(u, x) for u in E)

    def divide_set(self, E, x):
        """E . x^-1 = {v : v x in E}."""
        if E is UNIVERSE:
            raise ResourceLimit(
                f"{self.family}: cannot divide the universal set by an element")
        out = set()
        for u in E:
            part = self.right_divide_point(u, x)
            if part is UNIVERSE:
                return UNIVERSE
            out |= part
        return frozenset(out)

    def power(self, u, n: int):
        acc = self.identity()
        for _ in range(n):
            acc = self.multiply(acc, u)
        return acc

    # --- encoding -----------------------------------------------------

    def elem_to_json(self, u):
        raise NotImplementedError

    def elem_from_json(self, obj):
        raise NotImplementedError

    def elem_str(self, u) -> str:
        raise NotImplementedError


class IntegerGroup(Structure):
    """(Z, +)."""

    family = "Z"
    is_group = True

    def identity(self):
        return 0

    def multiply(self, u, v):
        return u + v

    def invert(self, u):
        return -u

    def default_generators(self):
        return [1, -1]

    def is_standard_generators(self, gens):
        return set(gens) == {1, -1}

    def elem_key(self, u):
        return (abs(u), 0 if u >= 0 else 1)

    def word_length(self, u):
        return abs(u)

    def right_divide_point(self, u, x):
        return frozenset([u - x])

    def elem_to_json(self, u):
        return u

    def elem_from_json(self, obj):
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise InvalidInput(f"Z element must be an int, got {obj!r}")
        return obj

    def elem_str(self, u):
        return str(u)


class IntegerLattice(Structure):
    """(Z^d, +)."""

    family = "Zd"
    is_group = True

    def __init__(self, d: int):
        if d < 1:
            raise InvalidInput("Zd needs d >= 1")
        self.d = d

    def identity(self):
        return (0,) * self.d

    def multiply(self, u, v):
        return tuple(a + b for a, b in zip(u, v))

    def invert(self, u):
        return tuple(-a for a in u)

    def default_generators(self):
        gens = []
        for i in range(self.d):
            e = [0] * self.d
            e[i] = 1
            gens.append(tuple(e))
            e2 = [0] * self.d
            e2[i] = -1
            gens.append(tuple(e2))
        return gens

    def is_standard_generators(self, gens):
        return set(gens) == set(self.default_generators())

    def elem_key(self, u):
        # geodesic letters in generator order: +e_i before -e_i, i ascending
        letters = []
        for i, c in enumerate(u):
            rank = 2 * i + 1 if c >= 0 else 2 * i + 2
            letters.extend([rank] * abs(c))
        return (self.word_length(u), tuple(letters))

    def word_length(self, u):
        return sum(abs(a) for a in u)

    def right_divide_point(self, u, x):
        return frozenset([tuple(a - b for a, b in zip(u, x))])

    def elem_to_json(self, u):
        return list(u)

    def elem_from_json(self, obj):
        if (not isinstance(obj, (list, tuple)) or len(obj) != self.d
                or not all(isinstance(a, int) and not isinstance(a, bool) for a in obj)):
            raise InvalidInput(f"Zd element must be a list of {self.d} ints, got {obj!r}")
        return tuple(obj)

    def elem_str(self, u):
        return "(" + ",".join(str(a) for a in u) + ")"


def _letter_names(rank: int):
    if rank <= 26:
        return [chr(ord("a") + i) for i in range(rank)]
    return [f"g{i + 1}" for i in range(rank)]


class FreeStructure(Structure):
    """Free group (inverses=True) or free monoid (inverses=False) of given rank."""

    def __init__(self, rank: int, inverses: bool = True):
        if rank < 1:
            raise InvalidInput("free structure needs rank >= 1")
        self.rank = rank
        self.inverses = inverses
        self.is_group = inverses
        self.family = "free"
        self.names = _letter_names(rank)

    def identity(self):
        return ()

    def _check_letters(self, u):
        for g in u:
            if g == 0 or abs(g) > self.rank:
                raise InvalidInput(f"letter {g} out of range for rank {self.rank}")
            if g < 0 and not self.inverses:
                raise InvalidInput("free monoid words cannot contain inverse letters")

    def multiply(self, u, v):
        if not self.inverses:
            return u + v
        # reduced concatenation: cancel at the seam
        i = len(u)
        j = 0
        while i > 0 and j < len(v) and u[i - 1] == -v[j]:
            i -= 1
            j += 1
        return u[:i] + v[j:]

    def invert(self, u):
        if not self.inverses:
            raise InvalidInput("free monoid: no inverses")
        return tuple(-g for g in reversed(u))

    def default_generators(self):
        gens = []
        for g in range(1, self.rank + 1):
            gens.append((g,))
            if self.inverses:
                gens.append((-g,))
        return gens

    def is_standard_generators(self, gens):
        return set(gens) == set(self.default_generators())

    def _letter_rank(self, g):
        return g if not self.inverses else (2 * g - 1 if g > 0 else 2 * (-g))

    def elem_key(self, u):
        return (len(u), tuple(self._letter_rank(g) for g in u))

    def word_length(self, u):
        return len(u)

    def right_divide_point(self, u, x):
        if self.inverses:
            return frozenset([self.multiply(u, self.invert(x))])
        # monoid: v x = u iff x is a suffix of u
        n = len(x)
        if n <= len(u) and (n == 0 or u[len(u) - n:] == x):
            return frozenset([u[:len(u) - n]])
        return frozenset()

    def elem_to_json(self, u):
        return list(u)

    def elem_from_json(self, obj):
        if not isinstance(obj, (list, tuple)) or not all(
                isinstance(g, int) and not isinstance(g, bool) for g in obj):
            raise InvalidInput(f"free word must be a list of nonzero ints, got {obj!r}")
        u = tuple(obj)
        self._check_letters(u)
        if self.inverses:
            # must come in reduced
            for a, b in zip(u, u[1:]):
                if a == -b:
                    raise InvalidInput(f"word {obj!r} is not reduced")
        return u

    def elem_str(self, u):
        if not u:
            return "e"
        parts = []
        for g in u:
            name = self.names[abs(g) - 1]
            parts.append(name if g > 0 else name + "^-1")
        return ".".join(parts)


class TableMonoid(Structure):
    """Finite monoid from a row-major table; element 0 is the identity."""

    family = "table"

    def __init__(self, table, names=None, validate=True):
        self.table = [list(row) for row in table]
        n = len(self.table)
        if n == 0:
            raise InvalidInput("empty multiplication table")
        self.size = n
        self.names = list(names) if names else [f"m{i}" for i in range(n)]
        if names and len(self.names) != n:
            raise InvalidInput("names length does not match table size")
        if validate:
            self._validate()
        self.is_group = all(
            any(self.table[i][j] == 0 and self.table[j][i] == 0 for j in range(n))
            for i in range(n))
        self._div_cache = {}

    def _validate(self):
        n = self.size
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise InvalidInput(f"table row {i} has length {len(row)}, expected {n}")
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                    raise InvalidInput(f"table entry {v!r} out of range")
        for j in range(n):
            if self.table[0][j] != j or self.table[j][0] != j:
                raise InvalidInput("element 0 is not a two-sided identity")
        t = self.table
        for i in range(n):
            ti = t[i]
            for j in range(n):
                tij = ti[j]
                tj = t[j]
                for k in range(n):
                    if t[tij][k] != ti[tj[k]]:
                        raise InvalidInput(
                            f"table is not associative at ({i},{j},{k})")

    def identity(self):
        return 0

    def multiply(self, u, v):
        return self.table[u][v]

    def invert(self, u):
        for j in range(self.size):
            if self.table[u][j] == 0 and self.table[j][u] == 0:
                return j
        raise InvalidInput(f"element {u} has no inverse")

    def elements(self):
        return range(self.size)

    def elem_key(self, u):
        return (u,)

    def right_divide_point(self, u, x):
        key = x
        if key not in self._div_cache:
            col = {}
            for v in range(self.size):
                col.setdefault(self.table[v][x], set()).add(v)
            self._div_cache[key] = {w: frozenset(vs) for w, vs in col.items()}
        return self._div_cache[key].get(u, frozenset())

    def elem_to_json(self, u):
        return u

    def elem_from_json(self, obj):
        if not isinstance(obj, int) or isinstance(obj, bool) or not 0 <= obj < self.size:
            raise InvalidInput(f"table element must be an index in [0,{self.size}), got {obj!r}")
        return obj

    def elem_str(self, u):
        return self.names[u]


class ZeroAdjoinedMonoid(Structure):
    """Free monoid on `rank` letters with an adjoined absorbing zero theta."""

    family = "zero_adjoined"

    def __init__(self, rank: int = 1):
        if rank < 1:
            raise InvalidInput("zero_adjoined needs rank >= 1")
        self.rank = rank
        self.base = FreeStructure(rank, inverses=False)
        self.names = self.base.names

    def identity(self):
        return ()

    def multiply(self, u, v):
        if u == THETA or v == THETA:
            return THETA
        return u + v

    def default_generators(self):
        return [THETA]

    def elem_key(self, u):
        if u == THETA:
            return (1, (0,))
        return (len(u), u)

    def word_length(self, u):
        # grading by letters, with theta at level 1 (its BFS level for X={theta})
        return 1 if u == THETA else len(u)

    def right_divide_point(self, u, x):
        if x == THETA:
            # v theta = theta for every v
            return UNIVERSE if u == THETA else frozenset()
        if u == THETA:
            return frozenset([THETA])
        return self.base.right_divide_point(u, x)

    def mult_set(self, E, x):
        if E is UNIVERSE:
            if x == THETA:
                return frozenset([THETA])
            if x == ():
                return UNIVERSE
            raise ResourceLimit(
                "zero_adjoined: M0 . w is an infinite proper subset; not representable")
        return frozenset(self.multiply(u, x) for u in E)

    def divide_set(self, E, x):
        if E is UNIVERSE:
            # {v : v x in M0} is everything
            return UNIVERSE
        if x == THETA:
            return UNIVERSE if THETA in E else frozenset()
        return super().divide_set(E, x)

    def elem_to_json(self, u):
        return THETA if u == THETA else list(u)

    def elem_from_json(self, obj):
        if obj == THETA:
            return THETA
        return self.base.elem_from_json(obj)

    def elem_str(self, u):
        if u == THETA:
            return THETA
        return self.base.elem_str(u)


# ---------------------------------------------------------------------------
# loading / spec parsing
# ---------------------------------------------------------------------------

def structure_from_spec(spec: dict):
    """Build (structure, generators) from a spec dict.

    Shape: {"family": ..., "params": {...}, "generators": [elem, ...]}
    Generators are optional where the family has a standard set.
    """
    if not isinstance(spec, dict):
        raise InvalidInput("structure spec must be a JSON object")
    family = spec.get("family")
    params = spec.get("params", {}) or {}
    if family == "Z":
        s = IntegerGroup()
    elif family == "Zd":
        if "d" not in params:
            raise InvalidInput("Zd needs params.d")
        s = IntegerLattice(int(params["d"]))
    elif family == "free":
        if "rank" not in params:
            raise InvalidInput("free needs params.rank")
        s = FreeStructure(int(params["rank"]), bool(params.get("inverses", True)))
    elif family == "table":
        if "table" not in params:
            raise InvalidInput("table needs params.table")
        s = TableMonoid(params["table"], params.get("names"))
    elif family == "zero_adjoined":
        s = ZeroAdjoinedMonoid(int(params.get("rank", 1)))
    else:
        raise InvalidInput(f"unknown structure family {family!r}")
    raw_gens = spec.get("generators")
    if raw_gens is None:
        gens = s.default_generators()
    else:
        gens = [s.elem_from_json(g) for g in raw_gens]
        if not gens:
            raise InvalidInput("generator list is empty")
    e = s.identity()
    for g in gens:
        if g == e:
            raise InvalidInput("the identity may not appear among the generators")
    return s, gens


# ---------------------------------------------------------------------------
# balls, spheres, ancestry
# ---------------------------------------------------------------------------

@dataclass
class BallTable:
    """Division-closure balls B_0..B_depth and their level sets."""

    structure: Structure
    gens: list
    depth: int
    balls: list        # frozenset or UNIVERSE, cumulative
    levels: list       # sorted list of new elements per level; UNIVERSE marker once
    level_of: dict = field(default_factory=dict)

    def ball(self, n):
        return self.balls[n]

    def sphere(self, n):
        lev = self.levels[n]
        if lev is UNIVERSE:
            raise ResourceLimit("sphere of a universal ball is not enumerable")
        return lev

    def sizes(self):
        return ["all" if b is UNIVERSE else len(b) for b in self.balls]

    def universal_at(self) -> Optional[int]:
        for n, b in enumerate(self.balls):
            if b is UNIVERSE:
                return n
        return None

    def stable_at(self) -> Optional[int]:
        """First n >= 1 with B_n == B_(n-1) (fixpoint of the recursion)."""
        for n in range(1, self.depth + 1):
            a, b = self.balls[n], self.balls[n - 1]
            if a is UNIVERSE and b is UNIVERSE:
                return n
            if a is not UNIVERSE and b is not UNIVERSE and a == b:
                return n
        return None


def division_balls(s: Structure, gens, depth: int, cap: Optional[int] = None) -> BallTable:
    cap = ball_cap() if cap is None else cap
    e = s.identity()
    balls = [frozenset([e])]
    levels = [[e]]
    level_of = {e: 0}
    for n in range(1, depth + 1):
        prev = balls[-1]
        if prev is UNIVERSE:
            balls.append(UNIVERSE)
            levels.append([])
            continue
        acc = set(prev)
        universal = False
        for x in gens:
            m = s.mult_set(prev, x)
            if m is UNIVERSE:
                universal = True
                break
            acc |= m
            d = s.divide_set(prev, x)
            if d is UNIVERSE:
                universal = True
                break
            acc |= d
        if universal:
            balls.append(UNIVERSE)
            levels.append(UNIVERSE)
            continue
        if len(acc) > cap:
            raise ResourceLimit(
                f"ball B_{n} has {len(acc)} elements, over the cap {cap} "
                f"(set {BALL_CAP_ENV} to raise it)")
        new = sorted(acc - prev, key=s.elem_key)
        for u in new:
            level_of[u] = n
        balls.append(frozenset(acc))
        levels.append(new)
    return BallTable(s, list(gens), depth, balls, levels, level_of)


def closed_form_ball_size(s: Structure, gens, n: int) -> Optional[int]:
    """|B_n| without enumeration, when the generators are the standard set."""
    if not s.is_standard_generators(gens):
        return None
    if isinstance(s, IntegerGroup):
        return 2 * n + 1
    if isinstance(s, IntegerLattice):
        d = s.d
        # l1 ball: sum_k 2^k C(d,k) C(n,k)
        from math import comb
        return sum((1 << k) * comb(d, k) * comb(n, k) for k in range(0, min(d, n) + 1))
    if isinstance(s, FreeStructure):
        if s.inverses:
            r = s.rank
            if r == 1:
                return 2 * n + 1
            q = 2 * r - 1
            return 1 + 2 * r * (q ** n - 1) // (q - 1) if n >= 1 else 1
        r = s.rank
        if r == 1:
            return n + 1
        return (r ** (n + 1) - 1) // (r - 1)
    return None


@dataclass
class PseudoFiniteReport:
    found: bool
    n: Optional[int]
    depth: int
    ball_sizes: list
    reason: str


def pseudo_finite_within(s: Structure, gens, depth: int,
                         cap: Optional[int] = None) -> PseudoFiniteReport:
    """Is M = B_n for some n <= depth?  (M^0-style universal balls count.)"""
    if s.size is not None:
        bt = division_balls(s, gens, depth, cap)
        sizes = bt.sizes()
        for n, b in enumerate(bt.balls):
            if len(b) == s.size:
                return PseudoFiniteReport(True, n, depth, sizes[:n + 1],
                                          f"B_{n} exhausts all {s.size} elements")
        stall = bt.stable_at()
        reason = (f"balls stall at B_{stall} with {sizes[stall]} of {s.size} elements"
                  if stall is not None else f"B_{depth} has {sizes[-1]} of {s.size} elements")
        return PseudoFiniteReport(False, None, depth, sizes, reason)
    if isinstance(s, ZeroAdjoinedMonoid):
        bt = division_balls(s, gens, depth, cap)
        un = bt.universal_at()
        if un is not None:
            return PseudoFiniteReport(True, un, depth, bt.sizes()[:un + 1],
                                      f"B_{un} is the whole monoid")
        return PseudoFiniteReport(False, None, depth, bt.sizes(),
                                  "no ball reached the whole monoid")
    # Z / Zd / free: every ball is finite while M is infinite, so no
    # enumeration is needed (or possible at the depths this gets asked at).
    sizes = []
    for n in range(0, min(depth, 64) + 1):
        cs = closed_form_ball_size(s, gens, n)
        if cs is None:
            break
        sizes.append(cs)
    return PseudoFiniteReport(False, None, depth, sizes,
                              "monoid is infinite but every ball is finite")


@dataclass
class AncestryStep:
    elem: object
    op: Optional[str]   # None for z_1=u; then "mul" (z_prev = z.x) or "div" (z = z_prev.x)
    x: Optional[object]


def find_ancestry(s: Structure, gens, u, max_depth: int,
                  cap: Optional[int] = None):
    """Chain z_1=u, ..., z_n=e with each step a multiplication or division
    by a generator, read off the ball recursion.  Returns (chain, ball_table)
    or (None, ball_table) if u is outside B_max_depth.
    """
    bt = division_balls(s, gens, max_depth, cap)
    lvl = bt.level_of.get(u)
    if lvl is None:
        # not discovered at a finite level; covered only if a ball went universal
        lvl = bt.universal_at()
    if lvl is None:
        return None, bt
    chain = [AncestryStep(u, None, None)]
    current = u
    for i in range(lvl, 0, -1):
        parent = None
        step = None
        for x in gens:
            cands = s.right_divide_point(current, x)
            if cands is UNIVERSE:
                # every v satisfies v.x = current; any lower-level element works
                cands = frozenset(v for v, l in bt.level_of.items() if l <= i - 1)
            picks = [v for v in cands if bt.level_of.get(v, max_depth + 1) <= i - 1]
            if picks:
                parent = min(picks, key=s.elem_key)
                step = ("mul", x)
                break
            w = s.multiply(current, x)
            if bt.level_of.get(w, max_depth + 1) <= i - 1:
                parent = w
                step = ("div", x)
                break
        if parent is None:
            raise RuntimeError("ancestry backtrack failed (ball recursion broken)")
        chain.append(AncestryStep(parent, step[0], step[1]))
        current = parent
    return chain, bt


def h_x_fixpoint(s: Structure, gens, max_depth: int, cap: Optional[int] = None):
    """Run the ball recursion to a fixpoint (or max_depth).  Returns
    (ball_table, stabilized_at or None)."""
    cap = ball_cap() if cap is None else cap
    bt = division_balls(s, gens, max_depth, cap)
    return bt, bt.stable_at()


# ---------------------------------------------------------------------------
# right-multiplication BFS (geodesic words over a generating set)
# ---------------------------------------------------------------------------

def bfs_words(s: Structure, gens, depth: int, cap: Optional[int] = None,
              targets=None):
    """Lexicographically-least shortest words over `gens` (right multiplication).

    Returns (levels, words) where words maps element -> tuple of generator
    indices.  Stops early once all `targets` are found, if given.
    """
    cap = ball_cap() if cap is None else cap
    e = s.identity()
    words = {e: ()}
    levels = [[e]]
    frontier = [e]
    remaining = set(targets) if targets is not None else None
    if remaining is not None:
        remaining.discard(e)
    for _ in range(depth):
        if remaining is not None and not remaining:
            break
        nxt = []
        for u in frontier:
            wu = words[u]
            for i, x in enumerate(gens):
                v = s.multiply(u, x)
                if v not in words:
                    words[v] = wu + (i,)
                    nxt.append(v)
                    if remaining is not None:
                        remaining.discard(v)
        if len(words) > cap:
            raise ResourceLimit(
                f"word BFS exceeded cap {cap} (set {BALL_CAP_ENV} to raise it)")
        if not nxt:
            break
        levels.append(nxt)
        frontier = nxt
    return levels, words


def geodesic_word(s: Structure, gens, u, max_depth: int, cap: Optional[int] = None):
    """Least shortest word for u over gens, as a tuple of generator indices."""
    # closed forms for the standard generating sets
    if s.is_standard_generators(gens):
        idx = {g: i for i, g in enumerate(gens)}
        if isinstance(s, IntegerGroup):
            step = 1 if u >= 0 else -1
            return tuple(idx[step] for _ in range(abs(u)))
        if isinstance(s, IntegerLattice):
            out = []
            for i, c in enumerate(u):
                e = [0] * s.d
                e[i] = 1 if c >= 0 else -1
                out.extend([idx[tuple(e)]] * abs(c))
            return tuple(out)
        if isinstance(s, FreeStructure):
            return tuple(idx[(g,)] for g in u)
    _, words = bfs_words(s, gens, max_depth, cap, targets=[u])
    if u not in words:
        raise ResourceLimit(f"element not reached within depth {max_depth}")
    return words[u]
