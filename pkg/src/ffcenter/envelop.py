"""PBW engine for the orthogonal/symplectic loop algebras and their
enveloping algebras, with the vacuum module at a chosen level.

Generators are symbols F[i,j;r] = (r, i, j) subject to the linear symmetry
F + F' = 0, which pairs (i, j) with (j', i'); only the lexicographically
smaller member of each pair is stored (the other is rewritten with its
relating sign, and self-paired symbols with sign -1 are zero).

Structure constants are not hand-coded: they are extracted at context
construction from the matrix relation

    F[r]_1 F[s]_2 - F[s]_2 F[r]_1
        = (P - Q) F[r+s]_2 - F[r+s]_2 (P - Q) + r d_{r,-s} (P - Q) K'

by matching the coefficient of e_ij x e_kl on both sides, where K' = K
orthogonally and 2K symplectically.  This works uniformly for the
antidiagonal form and for G = identity.

PBW order: modes ascend left to right (most negative first), ties broken
row-major on the index pair, so nonnegative modes sit rightmost and the
vacuum-module reduction is a suffix check.  The central element K is
replaced by the context level whenever a bracket produces it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .brauer import hook_diagram, transposition_diagram
from .commpoly import CommPoly
from .exact import format_fraction
from .tensorrep import Form, ORTHOGONAL, SYMPLECTIC, build_form, diagram_op

GenSymbol = Tuple[int, int, int]  # (mode r, i, j)
Word = Tuple[GenSymbol, ...]

TAU = "tau"


def critical_level(case: str, N: int) -> Fraction:
    """-h^v: -(N-2) orthogonal, -(n+1) symplectic."""
    if case == ORTHOGONAL:
        return Fraction(-(N - 2))
    return Fraction(-(N // 2 + 1))


class AlgebraContext:
    """Structure tables for U(g_N loop algebra + center) at a fixed level.

    The level only enters through brackets that produce the central
    element; purely nonnegative-mode computations never see it.
    """

    def __init__(self, case: str, N: int, level: Fraction | None = None,
                 form: Form | None = None):
        self.case = case
        self.N = N
        self.n = N // 2
        self.form = form if form is not None else build_form(case, N)
        if self.form.case != case or self.form.N != N:
            raise ValueError("form does not match the algebra")
        self.level = Fraction(level) if level is not None else critical_level(case, N)
        self.central_mult = Fraction(1 if case == ORTHOGONAL else 2)
        self._build_canon()
        self._build_brackets()
        self._norm_cache: Dict[Word, Dict[Word, Fraction]] = {}
        self._tau_cache: dict = {}

    # -- canonicalization of index pairs under F + F' = 0 ------------------

    def _build_canon(self) -> None:
        N = self.N
        form = self.form
        canon: Dict[Tuple[int, int], Optional[Tuple[Fraction, Tuple[int, int]]]] = {}
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                a = next(x for x in range(1, N + 1) if form.g(i, x) != 0)
                b = next(x for x in range(1, N + 1) if form.ginv(x, j) != 0)
                coeff = -form.g(i, a) * form.ginv(b, j)
                partner = (b, a)
                if partner == (i, j):
                    canon[(i, j)] = None if coeff == -1 else (Fraction(1), (i, j))
                elif (i, j) <= partner:
                    canon[(i, j)] = (Fraction(1), (i, j))
                else:
                    canon[(i, j)] = (coeff, partner)
        self._canon = canon
        self.pairs = sorted(
            p for p, v in canon.items() if v is not None and v[1] == p
        )
        for (i, j), v in canon.items():
            if v is None:
                continue
            _, (p, q) = v
            v2 = canon[(p, q)]
            if v2 is None or v2[1] != (p, q):
                raise AssertionError("pair canonicalization is not involutive")

    def canon_pair(self, i: int, j: int) -> Optional[Tuple[Fraction, Tuple[int, int]]]:
        return self._canon[(i, j)]

    def canon_sym(self, i: int, j: int, r: int) -> Optional[Tuple[Fraction, GenSymbol]]:
        v = self._canon[(i, j)]
        if v is None:
            return None
        c, (p, q) = v
        return c, (r, p, q)

    # -- structure constants ------------------------------------------------

    def _build_brackets(self) -> None:
        N = self.N
        P = diagram_op(transposition_diagram(2, 1, 2), self.form)
        Q = diagram_op(hook_diagram(2, 1, 2), self.form)
        M = P - Q
        ent: Dict[Tuple[int, int, int, int], Fraction] = {}
        for (r, c), v in M.entries.items():
            a = r % N + 1
            b = r // N + 1
            cc = c % N + 1
            d = c // N + 1
            ent[(a, b, cc, d)] = v

        def mval(a, b, c, d):
            return ent.get((a, b, c, d), Fraction(0))

        table: Dict[Tuple[Tuple[int, int], Tuple[int, int]],
                    Tuple[Tuple[Tuple[Fraction, Tuple[int, int]], ...], Fraction]] = {}
        for (i, j) in self.pairs:
            for (k, l) in self.pairs:
                acc: Dict[Tuple[int, int], Fraction] = {}
                for d in range(1, N + 1):
                    coeff = mval(i, k, j, d)
                    if coeff:
                        v = self.canon_pair(d, l)
                        if v is not None:
                            c2, pq = v
                            acc[pq] = acc.get(pq, Fraction(0)) + coeff * c2
                for b in range(1, N + 1):
                    coeff = mval(i, b, j, l)
                    if coeff:
                        v = self.canon_pair(k, b)
                        if v is not None:
                            c2, pq = v
                            acc[pq] = acc.get(pq, Fraction(0)) - coeff * c2
                struct = tuple(
                    (c, pq) for pq, c in sorted(acc.items()) if c != 0
                )
                central = self.central_mult * mval(i, k, j, l)
                table[((i, j), (k, l))] = (struct, central)
        self._table = table

    def bracket(self, x: GenSymbol, y: GenSymbol) -> Dict[Word, Fraction]:
        """[F_x, F_y] as a word map (canonical symbols; K folded to level)."""
        rx, i, j = x
        ry, k, l = y
        struct, central = self._table[((i, j), (k, l))]
        out: Dict[Word, Fraction] = {}
        u = rx + ry
        for c, (p, q) in struct:
            out[((u, p, q),)] = out.get(((u, p, q),), Fraction(0)) + c
        if rx + ry == 0 and rx != 0 and central != 0:
            cterm = Fraction(rx) * central * self.level
            if cterm:
                out[()] = out.get((), Fraction(0)) + cterm
        return {w: c for w, c in out.items() if c != 0}

    # -- PBW normalization ---------------------------------------------------

    def normalize(self, word: Word) -> Dict[Word, Fraction]:
        """PBW-ordered expansion of an arbitrary word of canonical symbols."""
        cached = self._norm_cache.get(word)
        if cached is not None:
            return cached
        pos = -1
        for t in range(len(word) - 1):
            if word[t] > word[t + 1]:
                pos = t
                break
        if pos < 0:
            out = {word: Fraction(1)}
            self._norm_cache[word] = out
            return out
        x, y = word[pos], word[pos + 1]
        head, tail = word[:pos], word[pos + 2:]
        acc: Dict[Word, Fraction] = {}

        def fold(sub: Dict[Word, Fraction], c: Fraction) -> None:
            for w, q in sub.items():
                s = acc.get(w, Fraction(0)) + q * c
                if s:
                    acc[w] = s
                else:
                    acc.pop(w, None)

        fold(self.normalize(head + (y, x) + tail), Fraction(1))
        for bw, bc in self.bracket(x, y).items():
            fold(self.normalize(head + bw + tail), bc)
        self._norm_cache[word] = acc
        return acc

    def structure_table(self):
        """The full bracket table over canonical pairs (read-only view)."""
        return self._table


def structure_constants(ctx: AlgebraContext):
    return ctx.structure_table()


class UElement:
    """Finite rational combination of PBW-ordered monomials."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: AlgebraContext, terms: Dict[Word, Fraction] | None = None):
        self.ctx = ctx
        self.terms: Dict[Word, Fraction] = {}
        if terms:
            for w, c in terms.items():
                if c != 0:
                    self.terms[w] = c

    @staticmethod
    def one(ctx: AlgebraContext) -> "UElement":
        return UElement(ctx, {(): Fraction(1)})

    @staticmethod
    def zero(ctx: AlgebraContext) -> "UElement":
        return UElement(ctx)

    @staticmethod
    def generator(ctx: AlgebraContext, i: int, j: int, r: int) -> "UElement":
        v = ctx.canon_sym(i, j, r)
        if v is None:
            return UElement(ctx)
        c, sym = v
        return UElement(ctx, {(sym,): c})

    def is_zero(self) -> bool:
        return not self.terms

    def _merge(self, other: Dict[Word, Fraction], c: Fraction,
               into: Dict[Word, Fraction]) -> None:
        for w, q in other.items():
            s = into.get(w, Fraction(0)) + q * c
            if s:
                into[w] = s
            else:
                into.pop(w, None)

    def __add__(self, other: "UElement") -> "UElement":
        out = dict(self.terms)
        self._merge(other.terms, Fraction(1), out)
        return UElement(self.ctx, out)

    def __sub__(self, other: "UElement") -> "UElement":
        out = dict(self.terms)
        self._merge(other.terms, Fraction(-1), out)
        return UElement(self.ctx, out)

    def __neg__(self) -> "UElement":
        return UElement(self.ctx, {w: -c for w, c in self.terms.items()})

    def scale(self, c) -> "UElement":
        c = Fraction(c)
        if c == 0:
            return UElement(self.ctx)
        return UElement(self.ctx, {w: q * c for w, q in self.terms.items()})

    def __mul__(self, other: "UElement") -> "UElement":
        out: Dict[Word, Fraction] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                self._merge(self.ctx.normalize(w1 + w2), c1 * c2, out)
        return UElement(self.ctx, out)

    def commutator(self, other: "UElement") -> "UElement":
        return self * other - other * self

    def pbw_degree(self) -> int:
        if not self.terms:
            return -1
        return max(len(w) for w in self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items()):
            mono = " ".join(sym_str(s) for s in w) if w else "1"
            parts.append(f"{c} {mono}")
        return " + ".join(parts)


def sym_str(s: GenSymbol) -> str:
    r, i, j = s
    return f"F[{i},{j};{r}]"


def pbw_normalize(word: Sequence[GenSymbol], ctx: AlgebraContext) -> UElement:
    """Normal-order a word of canonical generator symbols."""
    return UElement(ctx, ctx.normalize(tuple(word)))


def vacuum_reduce(x: UElement) -> UElement:
    """Delete monomials whose rightmost factor has a nonnegative mode
    (those annihilate the vacuum); constants survive."""
    out = {w: c for w, c in x.terms.items() if not w or w[-1][0] < 0}
    return UElement(x.ctx, out)


def vacuum_apply(x: UElement, v: UElement) -> UElement:
    """x . v in the vacuum module at the context level."""
    return vacuum_reduce(x * v)


class TauPoly:
    """Polynomial in the translation symbol tau with UElement coefficients;
    coeffs[k] multiplies tau^k."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: AlgebraContext, coeffs: Dict[int, UElement] | None = None):
        self.ctx = ctx
        self.coeffs: Dict[int, UElement] = {}
        if coeffs:
            for k, u in coeffs.items():
                if not u.is_zero():
                    self.coeffs[k] = u

    def coeff(self, k: int) -> UElement:
        return self.coeffs.get(k, UElement.zero(self.ctx))

    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __add__(self, other: "TauPoly") -> "TauPoly":
        out = dict(self.coeffs)
        for k, u in other.coeffs.items():
            out[k] = out.get(k, UElement.zero(self.ctx)) + u
        return TauPoly(self.ctx, out)

    def __sub__(self, other: "TauPoly") -> "TauPoly":
        out = dict(self.coeffs)
        for k, u in other.coeffs.items():
            out[k] = out.get(k, UElement.zero(self.ctx)) - u
        return TauPoly(self.ctx, out)

    def scale(self, c) -> "TauPoly":
        return TauPoly(self.ctx, {k: u.scale(c) for k, u in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TauPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"({u!r}) tau^{k}" for k, u in sorted(self.coeffs.items(), reverse=True)
        )

    def to_json(self) -> list:
        """[{tauDegree, terms: [{coeff, monomial}]}] sorted deterministically."""
        out = []
        for k in sorted(self.coeffs, reverse=True):
            u = self.coeffs[k]
            terms = []
            for w, c in sorted(u.terms.items()):
                terms.append(
                    {"coeff": format_fraction(c), "monomial": [sym_str(s) for s in w]}
                )
            out.append({"tauDegree": k, "terms": terms})
        return out


def tau_order(expr: Sequence, ctx: AlgebraContext) -> TauPoly:
    """Push every tau to the right of a mixed word using
    [tau, F[r]] = -r F[r-1], then PBW-normalize the generator prefixes.

    `expr` is a sequence of letters, each either TAU or a canonical
    GenSymbol; pass a dict {word: coeff} for a linear combination.
    """
    if isinstance(expr, dict):
        items = expr.items()
    else:
        items = [(tuple(expr), Fraction(1))]
    acc: Dict[int, Dict[Word, Fraction]] = {}
    for word, c0 in items:
        for (fword, k), c in _tau_normal(tuple(word), ctx).items():
            tgt = acc.setdefault(k, {})
            s = tgt.get(fword, Fraction(0)) + c * c0
            if s:
                tgt[fword] = s
            else:
                tgt.pop(fword, None)
    out: Dict[int, UElement] = {}
    for k, words in acc.items():
        u = UElement.zero(ctx)
        for w, c in words.items():
            u = u + UElement(ctx, ctx.normalize(w)).scale(c)
        out[k] = u
    return TauPoly(ctx, out)


def _tau_normal(word: tuple, ctx: AlgebraContext) -> Dict[Tuple[Word, int], Fraction]:
    """Rewrite a mixed word into sum of (generator word, tau power)."""
    cached = ctx._tau_cache.get(word)
    if cached is not None:
        return cached
    pos = -1
    for t in range(len(word) - 1):
        if word[t] == TAU and word[t + 1] != TAU:
            pos = t
            break
    if pos < 0:
        k = sum(1 for x in word if x == TAU)
        fword = tuple(x for x in word if x != TAU)
        out = {(fword, k): Fraction(1)}
        ctx._tau_cache[word] = out
        return out
    sym = word[pos + 1]
    r = sym[0]
    head, tail = word[:pos], word[pos + 2:]
    acc: Dict[Tuple[Word, int], Fraction] = {}

    def fold(sub, c):
        for key, q in sub.items():
            s = acc.get(key, Fraction(0)) + q * c
            if s:
                acc[key] = s
            else:
                acc.pop(key, None)

    fold(_tau_normal(head + (sym, TAU) + tail, ctx), Fraction(1))
    if r != 0:
        lowered = (r - 1, sym[1], sym[2])
        fold(_tau_normal(head + (lowered,) + tail, ctx), Fraction(-r))
    ctx._tau_cache[word] = acc
    return acc


def symbol(vec: UElement) -> CommPoly:
    """Top PBW-length part as a commutative polynomial in variables
    ("F", i, j, r)."""
    if vec.is_zero():
        return CommPoly.zero()
    top = vec.pbw_degree()
    out = CommPoly.zero()
    for w, c in vec.terms.items():
        if len(w) != top:
            continue
        counts: Dict = {}
        for (r, i, j) in w:
            v = ("F", i, j, r)
            counts[v] = counts.get(v, 0) + 1
        out = out + CommPoly.monomial(counts, c)
    return out
