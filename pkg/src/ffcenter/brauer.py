"""The Brauer algebra B_m(w) over exact rational functions of w.

A diagram on m strands is a perfect matching of the 2m endpoints
{1..m} (top row) and {m+1..2m} (bottom row, endpoint m+i sits below i).
Elements are finite RatFun-linear combinations of diagrams.  The product
of two diagrams stacks the first on top of the second, contracts the
middle row, and multiplies by w per closed loop.

The symmetrizer S^(m) -- the idempotent that absorbs every transposition
s_ij and kills every hook e_ij -- is built by any of four formulas
(JM, FUSION, ONEFACTOR, EXPANSION) which all yield the identical element;
results are memoized per (m, formula).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Dict, Iterable, Tuple

from .exact import RatFun, UniPoly, ratfun_normalize

PARAM = "w"

Pair = Tuple[int, int]


class SizeMismatch(ValueError):
    """Raised when combining Brauer elements on different strand counts."""


def _canon_pairs(pairs: Iterable[Pair]) -> tuple[Pair, ...]:
    out = sorted((min(a, b), max(a, b)) for a, b in pairs)
    return tuple(out)


class BrauerDiagram:
    """Perfect matching on 2m endpoints; canonical sorted-pair encoding."""

    __slots__ = ("m", "pairs", "_hash", "_partner")

    def __init__(self, m: int, pairs: Iterable[Pair]):
        self.m = m
        self.pairs = _canon_pairs(pairs)
        seen = set()
        for a, b in self.pairs:
            seen.add(a)
            seen.add(b)
        if len(self.pairs) != m or seen != set(range(1, 2 * m + 1)):
            raise ValueError(f"not a perfect matching on {2*m} endpoints: {pairs}")
        self._hash = hash((m, self.pairs))
        part = [0] * (2 * m + 1)
        for a, b in self.pairs:
            part[a] = b
            part[b] = a
        self._partner = tuple(part)

    def partner(self) -> Dict[int, int]:
        d: Dict[int, int] = {}
        for a, b in self.pairs:
            d[a] = b
            d[b] = a
        return d

    def is_permutation(self) -> bool:
        m = self.m
        return all(a <= m < b for a, b in self.pairs)

    def top_hooks(self) -> list[Pair]:
        m = self.m
        return [(a, b) for a, b in self.pairs if b <= m]

    def bottom_hooks(self) -> list[Pair]:
        m = self.m
        return [(a - m, b - m) for a, b in self.pairs if a > m]

    def through_pairs(self) -> list[Pair]:
        """(top endpoint, bottom position) for each through strand."""
        m = self.m
        return [(a, b - m) for a, b in self.pairs if a <= m < b]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BrauerDiagram):
            return NotImplemented
        return self.m == other.m and self.pairs == other.pairs

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "".join(f"({a} {b})" for a, b in self.pairs)


def identity_diagram(m: int) -> BrauerDiagram:
    return BrauerDiagram(m, [(i, m + i) for i in range(1, m + 1)])


def permutation_diagram(m: int, perm: dict[int, int] | list[int]) -> BrauerDiagram:
    """Diagram of a permutation: top i joined to bottom perm(i)."""
    if isinstance(perm, list):
        perm = {i + 1: v for i, v in enumerate(perm)}
    return BrauerDiagram(m, [(i, m + perm[i]) for i in range(1, m + 1)])


def transposition_diagram(m: int, i: int, j: int) -> BrauerDiagram:
    perm = {k: k for k in range(1, m + 1)}
    perm[i], perm[j] = j, i
    return permutation_diagram(m, perm)


def hook_diagram(m: int, i: int, j: int) -> BrauerDiagram:
    """e_ij: top pair (i,j), bottom pair (i,j), straight strands elsewhere."""
    pairs = [(i, j), (m + i, m + j)]
    for k in range(1, m + 1):
        if k != i and k != j:
            pairs.append((k, m + k))
    return BrauerDiagram(m, pairs)


def compose(d1: BrauerDiagram, d2: BrauerDiagram) -> tuple[BrauerDiagram, int]:
    """Stack d1 on top of d2; return (contracted diagram, closed-loop count).

    The bottom row of d1 is glued to the top row of d2; paths are traced
    through the glued middle row and every closed middle cycle is counted.
    """
    if d1.m != d2.m:
        raise SizeMismatch(f"strand counts differ: {d1.m} vs {d2.m}")
    m = d1.m
    p1 = d1._partner
    p2 = d2._partner
    # Glue point i joins d1's bottom endpoint m+i with d2's top endpoint i.
    glue_used = [False] * (m + 1)
    emitted_top = [False] * (m + 1)
    emitted_bot = [False] * (m + 1)
    new_pairs = []

    def from_glue_down(g: int) -> tuple[str, int]:
        # Enter d2 at top endpoint g, bounce through glue until external.
        while True:
            glue_used[g] = True
            nxt = p2[g]
            if nxt > m:
                return ("bot", nxt - m)
            glue_used[nxt] = True
            back = p1[m + nxt]
            if back <= m:
                return ("top", back)
            g = back - m

    def from_glue_up(g: int) -> tuple[str, int]:
        # Enter d1 at bottom endpoint m+g, bounce until external.
        while True:
            glue_used[g] = True
            nxt = p1[m + g]
            if nxt <= m:
                return ("top", nxt)
            glue_used[nxt - m] = True
            back = p2[nxt - m]
            if back > m:
                return ("bot", back - m)
            g = back

    def emit(akind: str, a: int, bkind: str, b: int) -> None:
        ea = a if akind == "top" else m + a
        eb = b if bkind == "top" else m + b
        new_pairs.append((ea, eb))
        (emitted_top if akind == "top" else emitted_bot)[a] = True
        (emitted_top if bkind == "top" else emitted_bot)[b] = True

    for i in range(1, m + 1):
        if emitted_top[i]:
            continue
        nxt = p1[i]
        if nxt <= m:
            emit("top", i, "top", nxt)
        else:
            kind, end = from_glue_down(nxt - m)
            emit("top", i, kind, end)
    for j in range(1, m + 1):
        if emitted_bot[j]:
            continue
        nxt = p2[m + j]
        if nxt > m:
            emit("bot", j, "bot", nxt - m)
        else:
            kind, end = from_glue_up(nxt)
            emit("bot", j, kind, end)

    loops = 0
    for g0 in range(1, m + 1):
        if glue_used[g0]:
            continue
        loops += 1
        g = g0
        while True:
            glue_used[g] = True
            h = p2[g]  # d2 top-top edge (internal by construction)
            glue_used[h] = True
            g = p1[m + h] - m  # d1 bottom-bottom edge
            if g == g0:
                break
    return BrauerDiagram(m, new_pairs), loops


class BrauerElement:
    """Finite RatFun-linear combination of diagrams on m strands."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Dict[BrauerDiagram, RatFun] | None = None):
        self.m = m
        self.terms: Dict[BrauerDiagram, RatFun] = {}
        if terms:
            for d, c in terms.items():
                if not c.is_zero():
                    self.terms[d] = c

    @staticmethod
    def from_diagram(d: BrauerDiagram, coeff: RatFun | None = None) -> "BrauerElement":
        c = coeff if coeff is not None else RatFun.const(1, PARAM)
        return BrauerElement(d.m, {d: c})

    @staticmethod
    def one(m: int) -> "BrauerElement":
        return BrauerElement.from_diagram(identity_diagram(m))

    @staticmethod
    def zero(m: int) -> "BrauerElement":
        return BrauerElement(m)

    def _check(self, other: "BrauerElement") -> None:
        if self.m != other.m:
            raise SizeMismatch(f"strand counts differ: {self.m} vs {other.m}")

    def __add__(self, other: "BrauerElement") -> "BrauerElement":
        self._check(other)
        out = dict(self.terms)
        for d, c in other.terms.items():
            s = out.get(d)
            out[d] = c if s is None else s + c
        return BrauerElement(self.m, out)

    def __neg__(self) -> "BrauerElement":
        return BrauerElement(self.m, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other: "BrauerElement") -> "BrauerElement":
        return self + (-other)

    def scale(self, c: RatFun) -> "BrauerElement":
        if c.is_zero():
            return BrauerElement(self.m)
        return BrauerElement(self.m, {d: q * c for d, q in self.terms.items()})

    def __mul__(self, other: "BrauerElement") -> "BrauerElement":
        self._check(other)
        w = RatFun.var(PARAM)
        wpow = {0: RatFun.const(1, PARAM)}
        out: Dict[BrauerDiagram, RatFun] = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                d, loops = compose(d1, d2)
                if loops not in wpow:
                    wpow[loops] = wpow[loops - 1] * w
                c = c1 * c2 * wpow[loops]
                s = out.get(d)
                out[d] = c if s is None else s + c
        return BrauerElement(self.m, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BrauerElement):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.m, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"({c!r})*{d!r}" for d, c in sorted(self.terms.items(), key=lambda t: t[0].pairs)]
        return " + ".join(parts)

    def text_dump(self) -> str:
        """Deterministic '(1 4)(2 3)|coeff' lines for debugging."""
        lines = []
        for d, c in sorted(self.terms.items(), key=lambda t: t[0].pairs):
            lines.append(f"{d!r}|{c!r}")
        return "\n".join(lines)


def _poly_lcm(a: UniPoly, b: UniPoly) -> UniPoly:
    return (a * b).divmod(a.gcd(b))[0].monic()


def _over_common_den(el: BrauerElement) -> tuple[UniPoly, int, Dict[BrauerDiagram, tuple[int, ...]]]:
    """Rewrite el = (1/(M*D(w))) * sum_d n_d(w) d with integer-coefficient n_d."""
    den = UniPoly.const(1, PARAM)
    for c in el.terms.values():
        den = _poly_lcm(den, c.den)
    nums: Dict[BrauerDiagram, UniPoly] = {}
    scale = 1
    for d, c in el.terms.items():
        q = den.divmod(c.den)[0]
        n = c.num * q
        nums[d] = n
        for coef in n.coeffs:
            if coef.denominator != 1:
                g = gcd(scale, coef.denominator)
                scale = scale // g * coef.denominator
    out = {
        d: tuple(int(coef * scale) for coef in n.coeffs) for d, n in nums.items()
    }
    return den, scale, out


def _int_conv(a: tuple[int, ...], b: tuple[int, ...], shift: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1 + shift)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j + shift] += x * y
    return out


def mul_fast(x: BrauerElement, y: BrauerElement) -> BrauerElement:
    """Exact product computed over a common polynomial denominator.

    Identical result to x * y; avoids per-composition gcd normalization,
    which matters for symmetrizer-squared checks at m = 5.
    """
    x._check(y)
    dx, mx, nx = _over_common_den(x)
    dy, my, ny = _over_common_den(y)
    acc: Dict[BrauerDiagram, list[int]] = {}
    for d1, a in nx.items():
        for d2, b in ny.items():
            d, loops = compose(d1, d2)
            conv = _int_conv(a, b, loops)
            cur = acc.get(d)
            if cur is None:
                acc[d] = conv
            else:
                if len(cur) < len(conv):
                    cur.extend([0] * (len(conv) - len(cur)))
                for i, v in enumerate(conv):
                    cur[i] += v
    den = dx * dy
    scale = Fraction(1, mx * my)
    terms: Dict[BrauerDiagram, RatFun] = {}
    for d, coeffs in acc.items():
        num = UniPoly([Fraction(c) for c in coeffs], PARAM).scale(scale)
        if num.is_zero():
            continue
        terms[d] = ratfun_normalize(num, den)
    return BrauerElement(x.m, terms)


def s_elem(m: int, i: int, j: int | None = None) -> BrauerElement:
    """s_i (adjacent) or s_ij as an element."""
    j = i + 1 if j is None else j
    return BrauerElement.from_diagram(transposition_diagram(m, i, j))


def eps_elem(m: int, i: int, j: int | None = None) -> BrauerElement:
    """e_i (adjacent) or e_ij as an element."""
    j = i + 1 if j is None else j
    return BrauerElement.from_diagram(hook_diagram(m, i, j))


def _const(c, m: int) -> BrauerElement:
    return BrauerElement.one(m).scale(RatFun.const(c, PARAM))


def _w_plus(c, m: int) -> BrauerElement:
    """(w + c) times the identity."""
    w = RatFun.from_poly(UniPoly([Fraction(c), Fraction(1)], PARAM))
    return BrauerElement.one(m).scale(w)


JM = "JM"
FUSION = "FUSION"
ONEFACTOR = "ONEFACTOR"
EXPANSION = "EXPANSION"
FORMULAS = (JM, FUSION, ONEFACTOR, EXPANSION)

_symmetrizer_cache: Dict[Tuple[int, str], BrauerElement] = {}


def group_symmetrizer(m: int) -> BrauerElement:
    """H^(m) = (1/m!) sum over permutation diagrams."""
    fact = 1
    for i in range(2, m + 1):
        fact *= i
    c = RatFun.const(Fraction(1, fact), PARAM)
    terms = {}
    for p in permutations(range(1, m + 1)):
        terms[permutation_diagram(m, list(p))] = c
    return BrauerElement(m, terms)


def _sym_jm(m: int) -> BrauerElement:
    out = BrauerElement.one(m)
    for r in range(2, m + 1):
        susp = BrauerElement.zero(m)
        for i in range(1, r):
            susp = susp + s_elem(m, i, r) - eps_elem(m, i, r)
        f1 = _const(1, m) + susp
        f2 = _w_plus(r - 3, m) + susp
        denom = RatFun.from_poly(
            UniPoly([Fraction(2 * r - 4), Fraction(1)], PARAM).scale(r)
        )
        out = out * f1 * f2
        out = out.scale(denom.inv())
    return out


def _lex_pairs(m: int) -> list[Pair]:
    return [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]


def _sym_fusion(m: int) -> BrauerElement:
    fact = 1
    for i in range(2, m + 1):
        fact *= i
    out = BrauerElement.one(m)
    for i, j in _lex_pairs(m):
        denom = RatFun.from_poly(UniPoly([Fraction(i + j - 3), Fraction(1)], PARAM))
        out = out * (BrauerElement.one(m) - eps_elem(m, i, j).scale(denom.inv()))
    for i, j in _lex_pairs(m):
        out = out * (
            BrauerElement.one(m) + s_elem(m, i, j).scale(RatFun.const(Fraction(1, j - i), PARAM))
        )
    return out.scale(RatFun.const(Fraction(1, fact), PARAM))


def _sym_onefactor(m: int) -> BrauerElement:
    fact = 1
    for i in range(2, m + 1):
        fact *= i
    out = BrauerElement.one(m)
    for i, j in _lex_pairs(m):
        denom = RatFun.from_poly(
            UniPoly([Fraction(j - i - 1), Fraction(1, 2)], PARAM)
        )
        out = out * (
            BrauerElement.one(m)
            + s_elem(m, i, j).scale(RatFun.const(Fraction(1, j - i), PARAM))
            - eps_elem(m, i, j).scale(denom.inv())
        )
    return out.scale(RatFun.const(Fraction(1, fact), PARAM))


def _disjoint_pair_sets(m: int, r: int) -> list[tuple[Pair, ...]]:
    """Unordered sets of r disjoint pairs from {1..m}."""
    out: list[tuple[Pair, ...]] = []

    def rec(avail: tuple[int, ...], chosen: tuple[Pair, ...]) -> None:
        if len(chosen) == r:
            out.append(chosen)
            return
        if len(avail) < 2 * (r - len(chosen)):
            return
        a = avail[0]
        rest = avail[1:]
        rec(rest, chosen)  # a unused by every pair
        for k, b in enumerate(rest):
            rec(rest[:k] + rest[k + 1 :], chosen + ((a, b),))

    rec(tuple(range(1, m + 1)), ())
    return out


def _sym_expansion(m: int) -> BrauerElement:
    h = group_symmetrizer(m)
    w = UniPoly([Fraction(0), Fraction(1, 2)], PARAM)  # w/2
    total = BrauerElement.one(m)
    for r in range(1, m // 2 + 1):
        # C(w/2 + m - 2, r)^{-1} * (-1)^r / (2^r r!)
        binp = UniPoly.const(1, PARAM)
        for t in range(r):
            binp = binp * (w + UniPoly.const(m - 2 - t, PARAM))
        # (-1)^r/(2^r r!) * C(w/2+m-2, r)^{-1}; the r! of the binomial cancels
        coeff = RatFun.from_poly(binp).inv().scale(Fraction((-1) ** r, 2**r))
        qsum = BrauerElement.zero(m)
        for pairs in _disjoint_pair_sets(m, r):
            prod = BrauerElement.one(m)
            for i, j in pairs:
                prod = prod * eps_elem(m, i, j)
            qsum = qsum + prod
        total = total + qsum.scale(coeff)
    return h * total


def symmetrizer(m: int, formula: str = JM) -> BrauerElement:
    """The symmetrizer S^(m), memoized per (m, formula)."""
    if m < 1:
        raise ValueError("m must be positive")
    key = (m, formula)
    cached = _symmetrizer_cache.get(key)
    if cached is not None:
        return cached
    if formula == JM:
        out = _sym_jm(m)
    elif formula == FUSION:
        out = _sym_fusion(m)
    elif formula == ONEFACTOR:
        out = _sym_onefactor(m)
    elif formula == EXPANSION:
        out = _sym_expansion(m)
    else:
        raise ValueError(f"unknown symmetrizer formula {formula!r}")
    _symmetrizer_cache[key] = out
    return out


def jm_factors(m: int) -> list[BrauerElement]:
    """The m-1 bracketed factors of the JM product (without the scalar
    normalizers); they commute pairwise."""
    out = []
    for r in range(2, m + 1):
        susp = BrauerElement.zero(m)
        for i in range(1, r):
            susp = susp + s_elem(m, i, r) - eps_elem(m, i, r)
        out.append((_const(1, m) + susp) * (_w_plus(r - 3, m) + susp))
    return out
