"""Commutative subalgebras of U(g[t]) and U(g), evaluation modules, and
Gaudin Hamiltonians on tensor products.

Everything is generated by the coefficients of tr S^(m) L_1(z) ... L_m(z)
with L(z) = d_z - B - F(z)_-, where F_ij(z)_- = sum_r F_ij[r] z^{-r-1} and
B is a numeric matrix with B + B' = 0.  Computations happen in a small
operator ring with basis d_z^j z^{-e} eps^k over PBW-normalized
enveloping-algebra coefficients; eps is an optional bookkeeping symbol
that tags B-factors for graded comparisons (it multiplies commutatively
and carries filtration degree -1).

The shift-of-argument family replaces F(z)_- by F z^{-1} (mode-0 symbols):
its d_z-free coefficients l^(s)_{mm} generate the subalgebra of U(g_N),
together with the Pfaffian coefficients of Pf(Bt + Ft z^{-1}) in type D.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from .brauer import symmetrizer
from .envelop import AlgebraContext, UElement
from .exact import RatFun, UniPoly, binomial
from .sugawara import ID_TAG, SKEW_TAG, _perm_sgn, symplectic_slot_paths
from .tensorrep import (
    ORTHOGONAL,
    OutOfDirectRange,
    SYMPLECTIC,
    act_brauer,
    trace_product,
)

Key = Tuple[int, int, int]  # (d_z power, z^{-e}, eps power)


class CoincidentPoints(ValueError):
    pass


class NotARepresentation(ValueError):
    pass


class LoopDiffOp:
    """sum U_{j,e,k} d_z^j z^{-e} eps^k with UElement coefficients,
    truncated at z-order <= order."""

    __slots__ = ("ctx", "order", "terms")

    def __init__(self, ctx: AlgebraContext, order: int,
                 terms: Dict[Key, UElement] | None = None):
        self.ctx = ctx
        self.order = order
        self.terms: Dict[Key, UElement] = {}
        if terms:
            for k, u in terms.items():
                if not u.is_zero() and k[1] <= order:
                    self.terms[k] = u

    @staticmethod
    def zero(ctx: AlgebraContext, order: int) -> "LoopDiffOp":
        return LoopDiffOp(ctx, order)

    @staticmethod
    def const(ctx: AlgebraContext, order: int, c) -> "LoopDiffOp":
        return LoopDiffOp(ctx, order, {(0, 0, 0): UElement.one(ctx).scale(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LoopDiffOp") -> "LoopDiffOp":
        out = dict(self.terms)
        for k, u in other.terms.items():
            s = out.get(k)
            s = u if s is None else s + u
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return LoopDiffOp(self.ctx, self.order, out)

    def __sub__(self, other: "LoopDiffOp") -> "LoopDiffOp":
        return self + other.scale(-1)

    def scale(self, c) -> "LoopDiffOp":
        return LoopDiffOp(
            self.ctx, self.order, {k: u.scale(c) for k, u in self.terms.items()}
        )

    def __mul__(self, other: "LoopDiffOp") -> "LoopDiffOp":
        out: Dict[Key, UElement] = {}
        for (j1, e1, k1), u1 in self.terms.items():
            for (j2, e2, k2), u2 in other.terms.items():
                # d^j1 z^{-e2} = sum_t C(j1,t) (d^t z^{-e2}) d^{j1-t}
                prod = None
                for t in range(0, j1 + 1):
                    e = e1 + e2 + t
                    if e > self.order:
                        break
                    c = binomial(j1, t)
                    for s in range(t):
                        c *= -(e2 + s)
                    if c == 0:
                        continue
                    if prod is None:
                        prod = u1 * u2
                        if prod.is_zero():
                            break
                    key = (j1 - t + j2, e, k1 + k2)
                    cur = out.get(key)
                    add = prod.scale(c)
                    cur = add if cur is None else cur + add
                    if cur.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = cur
        return LoopDiffOp(self.ctx, self.order, out)

    def coeff(self, j: int, e: int, keps: int = 0) -> UElement:
        return self.terms.get((j, e, keps), UElement.zero(self.ctx))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LoopDiffOp):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        parts = [
            f"({u!r}) d^{j} z^-{e} eps^{k}"
            for (j, e, k), u in sorted(self.terms.items())
        ]
        return " + ".join(parts) if parts else "0"


def check_b_matrix(ctx: AlgebraContext, B: Sequence[Sequence[Fraction]]) -> None:
    Bt = ctx.form.conj_transpose(B)
    for i in range(ctx.N):
        for j in range(ctx.N):
            if Bt[i][j] != -Fraction(B[i][j]):
                raise ValueError("B + B' = 0 fails")


def b_diagonal(ctx: AlgebraContext, entries: Sequence) -> tuple:
    """diag(b_1..b_n, (0,), -b_n..-b_1); satisfies B + B' = 0."""
    n = ctx.n
    if len(entries) != n:
        raise ValueError(f"need {n} diagonal entries")
    vals = [Fraction(b) for b in entries]
    diag = list(vals)
    if ctx.N % 2 == 1:
        diag.append(Fraction(0))
    diag.extend(-b for b in reversed(vals))
    B = tuple(
        tuple(diag[i] if i == j else Fraction(0) for j in range(ctx.N))
        for i in range(ctx.N)
    )
    check_b_matrix(ctx, B)
    return B


def _loop_slot_matrix(
    ctx: AlgebraContext,
    order: int,
    B: Sequence[Sequence[Fraction]] | None,
    modes: Sequence[int],
    eps_b: bool = False,
) -> List[List[LoopDiffOp]]:
    """The matrix L with entries d_z d_ij - B_ij - sum_r F_ij[r] z^{-r-1},
    modes restricted to `modes` (use range(order) for the loop family and
    (0,) with z^{-1} weight for shift-of-argument, see below)."""
    N = ctx.N
    keps = 1 if eps_b else 0
    out: List[List[LoopDiffOp]] = []
    for i in range(1, N + 1):
        row = []
        for j in range(1, N + 1):
            terms: Dict[Key, UElement] = {}
            if i == j:
                terms[(1, 0, 0)] = UElement.one(ctx)
            if B is not None and B[i - 1][j - 1] != 0:
                terms[(0, 0, keps)] = UElement.one(ctx).scale(-B[i - 1][j - 1])
            for r in modes:
                u = UElement.generator(ctx, i, j, r)
                if not u.is_zero() and r + 1 <= order:
                    terms[(0, r + 1, 0)] = u.scale(-1)
            row.append(LoopDiffOp(ctx, order, terms))
        out.append(row)
    return out


def gt_generators(
    ctx: AlgebraContext,
    m: int,
    B: Sequence[Sequence[Fraction]] | None = None,
    order: int = 3,
    eps_b: bool = False,
) -> LoopDiffOp:
    """tr S^(m) L_1(z) ... L_m(z) truncated at z^{-order}.

    The (j = m - i, e) component is the z^{-e} coefficient of l_{m i}(z);
    every coefficient is a PBW-normalized element of U(g[t]).  In the
    symplectic case the 1/(n-m+1) prefactor is included and n < m <= 2n is
    routed through the extension engine.
    """
    if B is not None:
        check_b_matrix(ctx, B)
    n = ctx.n
    if ctx.case == SYMPLECTIC and m > 2 * n:
        raise OutOfDirectRange(f"symplectic family needs m <= 2n, got {m}")
    if ctx.case == SYMPLECTIC and m > n:
        return _extended_trace(ctx, m, B, order, range(order), eps_b)
    mats = [_loop_slot_matrix(ctx, order, B, range(order), eps_b)] * m
    weight = act_brauer(symmetrizer(m), ctx.form)
    total = trace_product(weight, mats)
    if total is None:
        total = LoopDiffOp.zero(ctx, order)
    if ctx.case == SYMPLECTIC:
        total = total.scale(Fraction(1, n - m + 1))
    return total


def _extended_trace(ctx, m, B, order, modes, eps_b=False) -> LoopDiffOp:
    """Extension-engine version of the weighted trace for n < m <= 2n."""
    from .sugawara import skew_slot_matrices

    keps = 1 if eps_b else 0
    ft = skew_slot_matrices(ctx)
    options: List[Tuple[tuple, tuple]] = [((ID_TAG, None), ("dz",))]
    if B is not None:
        Bm = tuple(tuple(Fraction(x) for x in row) for row in B)
        if any(any(x for x in row) for row in Bm):
            options.append(((SKEW_TAG, Bm), ("b",)))
    for (p, q), M in sorted(ft.items()):
        for r in modes:
            if r + 1 <= order:
                options.append(((SKEW_TAG, M), ("f", r, p, q)))
    paths = symplectic_slot_paths(ctx, [options] * m)
    total = LoopDiffOp.zero(ctx, order)
    for letters, q in paths.items():
        elem = LoopDiffOp.const(ctx, order, q)
        for letter in letters:
            if letter[0] == "dz":
                op = LoopDiffOp(ctx, order, {(1, 0, 0): UElement.one(ctx)})
            elif letter[0] == "b":
                op = LoopDiffOp(ctx, order, {(0, 0, keps): UElement.one(ctx).scale(-1)})
            else:
                _, r, p, qq = letter
                op = LoopDiffOp(
                    ctx, order,
                    {(0, r + 1, 0): UElement(ctx, {((r, p, qq),): Fraction(-1)})},
                )
            elem = elem * op
        total = total + elem
    return total


def commutator_coefficients(ctx: AlgebraContext, ops: Sequence[LoopDiffOp]):
    """All pairwise commutators between the UElement coefficients of the
    given operators; yields ((key1, key2), commutator)."""
    coeffs = []
    for op in ops:
        coeffs.extend(op.terms.items())
    for a in range(len(coeffs)):
        for b in range(a + 1, len(coeffs)):
            k1, u1 = coeffs[a]
            k2, u2 = coeffs[b]
            yield (k1, k2), u1.commutator(u2)


# -- evaluation modules and Gaudin Hamiltonians ---------------------------


def vector_representation(ctx: AlgebraContext) -> Dict[Tuple[int, int], tuple]:
    """Matrices of the canonical generators on C^N: F_ij = E_ij - sum g ginv E."""
    N = ctx.N
    out = {}
    for (i, j) in ctx.pairs:
        M = [[Fraction(0)] * N for _ in range(N)]
        M[i - 1][j - 1] += 1
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                c = ctx.form.g(i, b) * ctx.form.ginv(a, j)
                if c:
                    M[a - 1][b - 1] -= c
        out[(i, j)] = tuple(tuple(row) for row in M)
    return out


class EvalModule:
    """A finite-dimensional g_N-module placed at an evaluation point."""

    def __init__(self, ctx: AlgebraContext, mats: Dict[Tuple[int, int], tuple],
                 point: Fraction):
        self.ctx = ctx
        self.point = Fraction(point)
        self.mats = {pq: tuple(tuple(Fraction(x) for x in row) for row in M)
                     for pq, M in mats.items()}
        dims = {len(M) for M in self.mats.values()}
        if len(dims) != 1:
            raise NotARepresentation("inconsistent matrix sizes")
        self.dim = dims.pop()
        self._validate()

    def _validate(self) -> None:
        ctx = self.ctx
        for (i, j) in ctx.pairs:
            if (i, j) not in self.mats:
                raise NotARepresentation(f"missing matrix for F[{i},{j}]")
        for x in ctx.pairs:
            for y in ctx.pairs:
                lhs = _mat_comm(self.mats[x], self.mats[y])
                rhs = [[Fraction(0)] * self.dim for _ in range(self.dim)]
                struct, _central = ctx.structure_table()[(x, y)]
                for c, pq in struct:
                    M = self.mats[pq]
                    for a in range(self.dim):
                        for b in range(self.dim):
                            rhs[a][b] += c * M[a][b]
                if lhs != tuple(tuple(r) for r in rhs):
                    raise NotARepresentation(f"bracket [{x}, {y}] fails")

    def generator(self, i: int, j: int) -> tuple:
        """rho(F_ij) for arbitrary indices through the canonical rewrite."""
        v = self.ctx.canon_pair(i, j)
        if v is None:
            return tuple(
                tuple(Fraction(0) for _ in range(self.dim)) for _ in range(self.dim)
            )
        c, pq = v
        M = self.mats[pq]
        return tuple(tuple(c * x for x in row) for row in M)


def _mat_comm(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = Fraction(0)
            for k in range(n):
                s += A[i][k] * B[k][j] - B[i][k] * A[k][j]
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def evaluation_module(ctx: AlgebraContext, mats, point) -> EvalModule:
    return EvalModule(ctx, mats, point)


class RatOp:
    """Polynomial in d_z whose coefficients are matrices over RatFun(z)."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Dict[int, tuple] | None = None):
        self.dim = dim
        self.terms: Dict[int, tuple] = {}
        if terms:
            for j, M in terms.items():
                if any(not x.is_zero() for row in M for x in row):
                    self.terms[j] = M

    @staticmethod
    def zero(dim: int) -> "RatOp":
        return RatOp(dim)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "RatOp") -> "RatOp":
        out = dict(self.terms)
        for j, M in other.terms.items():
            if j in out:
                out[j] = _rmat_add(out[j], M)
            else:
                out[j] = M
        return RatOp(self.dim, out)

    def scale(self, c) -> "RatOp":
        if isinstance(c, RatFun):
            f = c
        else:
            f = RatFun.const(c, "z")
        return RatOp(
            self.dim,
            {j: tuple(tuple(x * f for x in row) for row in M)
             for j, M in self.terms.items()},
        )

    def __mul__(self, other: "RatOp") -> "RatOp":
        out: Dict[int, tuple] = {}
        for j1, M1 in self.terms.items():
            for j2, M2 in other.terms.items():
                M2d = M2
                for t in range(0, j1 + 1):
                    c = binomial(j1, t)
                    prod = _rmat_mul(M1, M2d)
                    prod = tuple(tuple(x.scale(c) for x in row) for row in prod)
                    key = j1 - t + j2
                    if key in out:
                        out[key] = _rmat_add(out[key], prod)
                    else:
                        out[key] = prod
                    if t < j1:
                        M2d = tuple(
                            tuple(_ratfun_deriv(x) for x in row) for row in M2d
                        )
        return RatOp(self.dim, out)

    def eval_matrix(self, j: int, z0: Fraction) -> tuple:
        M = self.terms.get(j)
        if M is None:
            return tuple(
                tuple(Fraction(0) for _ in range(self.dim)) for _ in range(self.dim)
            )
        return tuple(tuple(x.eval(z0) for x in row) for row in M)


def _rmat_add(A, B):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def _rmat_mul(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = None
            for k in range(n):
                if A[i][k].is_zero() or B[k][j].is_zero():
                    continue
                t = A[i][k] * B[k][j]
                s = t if s is None else s + t
            row.append(s if s is not None else RatFun.const(0, "z"))
        out.append(tuple(row))
    return tuple(out)


def _ratfun_deriv(f: RatFun) -> RatFun:
    num = f.num.derivative() * f.den - f.num * f.den.derivative()
    return RatFun(num, f.den * f.den)


def _kron_site(dims: List[int], site: int, M: tuple) -> tuple:
    """1 x .. x M x .. x 1 on the tensor product (site 0-based)."""
    total = 1
    for d in dims:
        total *= d
    out = [[Fraction(0)] * total for _ in range(total)]
    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides.reverse()

    def decode(idx):
        out_idx = []
        for d, s in zip(dims, strides):
            out_idx.append((idx // s) % d)
        return out_idx

    for r in range(total):
        ridx = decode(r)
        for a in range(dims[site]):
            v = M[ridx[site]][a]
            if v == 0:
                continue
            cidx = list(ridx)
            cidx[site] = a
            c = 0
            for x, s in zip(cidx, strides):
                c += x * s
            out[r][c] += v
    return tuple(tuple(row) for row in out)


def gaudin_hamiltonians(
    modules: Sequence[EvalModule],
    B: Sequence[Sequence[Fraction]] | None,
    m: int,
) -> RatOp:
    """tr S^(m) applied to [d_ij d_z - b_ij - sum_s F^(s)_ij/(z - a_s)]
    acting on the tensor product of the evaluation modules."""
    ctx = modules[0].ctx
    points = [mod.point for mod in modules]
    if len(set(points)) != len(points):
        raise CoincidentPoints(f"evaluation points must be distinct: {points}")
    if B is not None:
        check_b_matrix(ctx, B)
    n = ctx.n
    if ctx.case == SYMPLECTIC and m > n:
        raise OutOfDirectRange("symplectic Hamiltonians implemented for m <= n")
    dims = [mod.dim for mod in modules]
    D = 1
    for d in dims:
        D *= d
    zero = RatFun.const(0, "z")
    one_mat = tuple(
        tuple(RatFun.const(1, "z") if i == j else zero for j in range(D))
        for i in range(D)
    )
    entries: List[List[RatOp]] = []
    for i in range(1, ctx.N + 1):
        row = []
        for j in range(1, ctx.N + 1):
            terms: Dict[int, tuple] = {}
            if i == j:
                terms[1] = one_mat
            m0 = [[zero] * D for _ in range(D)]
            nonzero = False
            if B is not None and B[i - 1][j - 1] != 0:
                c = RatFun.const(-Fraction(B[i - 1][j - 1]), "z")
                for a in range(D):
                    m0[a][a] = m0[a][a] + c
                nonzero = True
            for s, mod in enumerate(modules):
                M = mod.generator(i, j)
                if all(all(x == 0 for x in rrow) for rrow in M):
                    continue
                big = _kron_site(dims, s, M)
                pole = RatFun(
                    UniPoly.const(-1, "z"), UniPoly([-mod.point, Fraction(1)], "z")
                )  # -1/(z - a_s)
                for a in range(D):
                    for b in range(D):
                        if big[a][b]:
                            m0[a][b] = m0[a][b] + pole.scale(big[a][b])
                            nonzero = True
            if nonzero:
                terms[0] = tuple(tuple(r) for r in m0)
            row.append(RatOp(D, terms))
        entries.append(row)
    weight = act_brauer(symmetrizer(m), ctx.form)
    total = trace_product(weight, [entries] * m)
    if total is None:
        total = RatOp.zero(D)
    if ctx.case == SYMPLECTIC:
        total = total.scale(Fraction(1, n - m + 1))
    return total


# -- shift of argument ------------------------------------------------------


def shift_of_argument(ctx: AlgebraContext, B, mmax: int | None = None):
    """Generators of the shift-of-argument subalgebra of U(g_N).

    Returns {(m, s): l^(s)_{mm}} for even m = 2, 4, .., plus
    {("pf", r): p^(r)} in type D.  l_{mm}(z) is the d_z-free component of
    tr S^(m) (d_z - B - F z^{-1})^{x m}.
    """
    check_b_matrix(ctx, B)
    n = ctx.n
    if mmax is None:
        mmax = 2 * n if not _is_type_d(ctx) else 2 * n - 2
    out: Dict[tuple, UElement] = {}
    for m in range(2, mmax + 1, 2):
        op = _soa_trace(ctx, m, B)
        for s in range(0, m + 1):
            out[(m, s)] = op.coeff(0, s)
    if _is_type_d(ctx):
        for r, p in _pfaffian_soa(ctx, B).items():
            out[("pf", r)] = p
    return out


def _is_type_d(ctx: AlgebraContext) -> bool:
    return ctx.case == ORTHOGONAL and ctx.N % 2 == 0


def _soa_trace(ctx: AlgebraContext, m: int, B) -> LoopDiffOp:
    """tr S^(m)(d_z - B - F z^{-1})^{x m} with mode-0 generators."""
    order = m + 1
    if ctx.case == SYMPLECTIC and m > ctx.n:
        return _extended_trace(ctx, m, B, order, (0,))
    mats = [_loop_slot_matrix(ctx, order, B, (0,))] * m
    weight = act_brauer(symmetrizer(m), ctx.form)
    total = trace_product(weight, mats)
    if total is None:
        total = LoopDiffOp.zero(ctx, order)
    if ctx.case == SYMPLECTIC:
        total = total.scale(Fraction(1, ctx.n - m + 1))
    return total


def _pfaffian_soa(ctx: AlgebraContext, B) -> Dict[int, UElement]:
    """Coefficients of Pf(Bt + Ft z^{-1}), Bt = B G, Ft = F G (type D)."""
    N = ctx.N
    n = N // 2
    g = ctx.form.g
    # entries: (i, j) -> (scalar part, [(coeff, symbol)]), both for z^0 and z^{-1}
    bt: Dict[Tuple[int, int], Fraction] = {}
    ft: Dict[Tuple[int, int], Optional[Tuple[Fraction, tuple]]] = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            sb = Fraction(0)
            facc: Dict[tuple, Fraction] = {}
            for k in range(1, N + 1):
                c = g(k, j)
                if c == 0:
                    continue
                sb += Fraction(B[i - 1][k - 1]) * c
                v = ctx.canon_sym(i, k, 0)
                if v is not None:
                    cc, sym = v
                    facc[sym] = facc.get(sym, Fraction(0)) + cc * c
            facc = {s: c for s, c in facc.items() if c}
            bt[(i, j)] = sb
            if not facc:
                ft[(i, j)] = None
            else:
                (sym, c), = facc.items()
                ft[(i, j)] = (c, sym)
    fact = 1
    for i in range(2, n + 1):
        fact *= i
    acc: Dict[int, Dict[tuple, Fraction]] = {}
    for perm in permutations(range(1, N + 1)):
        sgn = _perm_sgn(perm)
        # expand the product of (bt + ft z^{-1}) entries over z-powers
        partial: List[Tuple[tuple, Fraction, int]] = [((), Fraction(sgn), 0)]
        for k in range(n):
            key = (perm[2 * k], perm[2 * k + 1])
            b = bt[key]
            f = ft[key]
            new = []
            for word, c, r in partial:
                if b != 0:
                    new.append((word, c * b, r))
                if f is not None:
                    cf, sym = f
                    new.append((word + (sym,), c * cf, r + 1))
            partial = new
        for word, c, r in partial:
            tgt = acc.setdefault(r, {})
            s = tgt.get(word, Fraction(0)) + c
            if s:
                tgt[word] = s
            else:
                tgt.pop(word, None)
    out: Dict[int, UElement] = {}
    for r, words in acc.items():
        u = UElement.zero(ctx)
        for w, c in words.items():
            u = u + UElement(ctx, ctx.normalize(w)).scale(c)
        u = u.scale(Fraction(1, 2**n * fact))
        if not u.is_zero():
            out[r] = u
    return out
