"""Small commutative polynomial ring over Fraction with hashable variables.

Monomials are sorted tuples of (variable, exponent); a variable is any
hashable token, e.g. ("h", 2) for a Cartan coordinate or ("F", i, j, r)
for the symbol of a loop generator.  Used for Harish-Chandra leading
terms and for symbols of enveloping-algebra elements.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Tuple

Var = Hashable
Monomial = Tuple[Tuple[Var, int], ...]


class CommPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Monomial, Fraction] | None = None):
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                if c != 0:
                    self.terms[mono] = c

    @staticmethod
    def zero() -> "CommPoly":
        return CommPoly()

    @staticmethod
    def const(c) -> "CommPoly":
        c = Fraction(c)
        return CommPoly({(): c}) if c else CommPoly()

    @staticmethod
    def var(v: Var, exp: int = 1) -> "CommPoly":
        return CommPoly({((v, exp),): Fraction(1)})

    @staticmethod
    def monomial(vars_exps: Dict[Var, int], coeff=1) -> "CommPoly":
        mono = tuple(sorted(((v, e) for v, e in vars_exps.items() if e), key=repr))
        return CommPoly({mono: Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CommPoly") -> "CommPoly":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, Fraction(0)) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return CommPoly(out)

    def __neg__(self) -> "CommPoly":
        return CommPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "CommPoly") -> "CommPoly":
        return self + (-other)

    def __mul__(self, other: "CommPoly") -> "CommPoly":
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _merge(m1, m2)
                s = out.get(mono, Fraction(0)) + c1 * c2
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        return CommPoly(out)

    def scale(self, c) -> "CommPoly":
        c = Fraction(c)
        if c == 0:
            return CommPoly()
        return CommPoly({m: q * c for m, q in self.terms.items()})

    def variables(self) -> set:
        out = set()
        for mono in self.terms:
            for v, _ in mono:
                out.add(v)
        return out

    def partial(self, v: Var) -> "CommPoly":
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            md = dict(mono)
            e = md.get(v, 0)
            if not e:
                continue
            md[v] = e - 1
            new = tuple(sorted(((k, x) for k, x in md.items() if x), key=repr))
            out[new] = out.get(new, Fraction(0)) + c * e
        return CommPoly(out)

    def eval(self, values: Dict[Var, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            x = c
            for v, e in mono:
                x *= Fraction(values[v]) ** e
            total += x
        return total

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e for _, e in mono) for mono in self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CommPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), repr(t[0]))):
            vs = "*".join(f"{v}^{e}" if e > 1 else f"{v}" for v, e in mono)
            parts.append(f"{c}" if not vs else f"{c}*{vs}")
        return " + ".join(parts)


def _merge(m1: Monomial, m2: Monomial) -> Monomial:
    md = dict(m1)
    for v, e in m2:
        md[v] = md.get(v, 0) + e
    return tuple(sorted(md.items(), key=repr))


def jacobian_rank(polys, point: Dict[Var, Fraction]) -> int:
    """Rank of the Jacobian of the given polynomials at an exact point."""
    vars_all = sorted({v for p in polys for v in p.variables()}, key=repr)
    rows = []
    for p in polys:
        rows.append([p.partial(v).eval(point) for v in vars_all])
    return _rank(rows)


def _rank(rows) -> int:
    rows = [list(r) for r in rows if any(x != 0 for x in r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    while rows and col < ncols:
        piv = next((i for i, r in enumerate(rows) if r[col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[0], rows[piv] = rows[piv], rows[0]
        head = rows[0]
        for r in rows[1:]:
            if r[col] != 0:
                f = r[col] / head[col]
                for j in range(col, ncols):
                    r[j] -= f * head[j]
        rows = rows[1:]
        rank += 1
        col += 1
    return rank
