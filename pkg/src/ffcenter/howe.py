"""Howe-dual sl2 actions, the extremal projector, and singular-vector traces.

Orthogonal case: the symmetrizer image inside (C^N)^{x m} is identified
with degree-m polynomials in z_1..z_N; sl2 acts by

    e = -1/2 sum_i d_i d_{i'},   f = 1/2 sum_i z_i z_{i'},
    h = -N/2 - deg,

with i' = N - i + 1.  Symplectic case: the antisymmetrizer image is the
degree-m part of the exterior algebra on zeta_1..zeta_2n with

    e = sum_{i<=n} d_i d_{i'},   f = -sum_{i<=n} zeta_i zeta_{i'},
    h = n - deg,

where d_i is the left derivative.  On each degree component h is a scalar,
so the denominators (h+2)...(h+r+1) of the extremal projector

    p = 1 + sum_r (-1)^r / (r! (h+2)...(h+r+1)) f^r e^r

are evaluated as exact scalars.  The projector's matrix equals the matrix
of the Brauer symmetrizer transported through the monomial isomorphism,
and the trace of p against the symmetrized entry matrix of Phi_1..Phi_m
reproduces the Segal-Sugawara vectors.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations
from typing import Dict, List, Sequence, Tuple

from .brauer import symmetrizer
from .envelop import TAU, AlgebraContext, TauPoly, tau_order
from .tensorrep import ORTHOGONAL, SYMPLECTIC, act_brauer

Basis = Tuple[tuple, ...]
Matrix = Dict[Tuple[int, int], Fraction]  # sparse (row, col)


class BadDegree(ValueError):
    pass


class NoSingularRange(ValueError):
    """Symplectic components with m > n have no singular vectors."""


def component_basis(case: str, N: int, m: int) -> Basis:
    """Ordered monomial basis: weakly increasing index tuples (symmetric)
    or strictly increasing tuples (exterior)."""
    if m < 0:
        raise BadDegree(f"negative degree {m}")
    if case == ORTHOGONAL:
        return tuple(combinations_with_replacement(range(1, N + 1), m))
    if m > N:
        return ()
    return tuple(combinations(range(1, N + 1), m))


def h_scalar(case: str, N: int, m: int) -> Fraction:
    if case == ORTHOGONAL:
        return Fraction(-N, 2) - m
    return Fraction(N // 2 - m)


def _sym_counts(mono: tuple, N: int) -> List[int]:
    counts = [0] * (N + 1)
    for i in mono:
        counts[i] += 1
    return counts


def _e_sym(mono: tuple, N: int) -> Dict[tuple, Fraction]:
    """-1/2 sum_i d_i d_{i'} on a symmetric monomial."""
    out: Dict[tuple, Fraction] = {}
    b = _sym_counts(mono, N)
    for i in range(1, N + 1):
        ip = N - i + 1
        c = Fraction(b[i] * (b[ip] - (1 if i == ip else 0)), -2)
        if c == 0:
            continue
        bb = list(b)
        bb[i] -= 1
        bb[ip] -= 1
        tgt = _counts_to_mono(bb, N)
        out[tgt] = out.get(tgt, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}


def _f_sym(mono: tuple, N: int) -> Dict[tuple, Fraction]:
    """1/2 sum_i z_i z_{i'} on a symmetric monomial."""
    out: Dict[tuple, Fraction] = {}
    b = _sym_counts(mono, N)
    for i in range(1, N + 1):
        ip = N - i + 1
        bb = list(b)
        bb[i] += 1
        bb[ip] += 1
        tgt = _counts_to_mono(bb, N)
        out[tgt] = out.get(tgt, Fraction(0)) + Fraction(1, 2)
    return {k: v for k, v in out.items() if v}


def _counts_to_mono(counts: List[int], N: int) -> tuple:
    out = []
    for i in range(1, N + 1):
        out.extend([i] * counts[i])
    return tuple(out)


def _ext_derivative(i: int, mono: tuple) -> Tuple[int, tuple] | None:
    """Left derivative d_i: sign and remaining tuple, or None."""
    if i not in mono:
        return None
    pos = mono.index(i)
    return (-1) ** pos, mono[:pos] + mono[pos + 1 :]


def _ext_wedge(i: int, mono: tuple) -> Tuple[int, tuple] | None:
    """zeta_i wedge: sign and extended tuple, or None."""
    if i in mono:
        return None
    pos = sum(1 for j in mono if j < i)
    return (-1) ** pos, tuple(sorted(mono + (i,)))


def _e_ext(mono: tuple, N: int) -> Dict[tuple, Fraction]:
    """sum_{i<=n} d_i d_{i'} (the primed derivative acts first)."""
    n = N // 2
    out: Dict[tuple, Fraction] = {}
    for i in range(1, n + 1):
        ip = N - i + 1
        first = _ext_derivative(ip, mono)
        if first is None:
            continue
        s1, rest = first
        second = _ext_derivative(i, rest)
        if second is None:
            continue
        s2, rest2 = second
        out[rest2] = out.get(rest2, Fraction(0)) + s1 * s2
    return {k: v for k, v in out.items() if v}


def _f_ext(mono: tuple, N: int) -> Dict[tuple, Fraction]:
    """-sum_{i<=n} zeta_i zeta_{i'} (the primed wedge acts first)."""
    n = N // 2
    out: Dict[tuple, Fraction] = {}
    for i in range(1, n + 1):
        ip = N - i + 1
        first = _ext_wedge(ip, mono)
        if first is None:
            continue
        s1, ext = first
        second = _ext_wedge(i, ext)
        if second is None:
            continue
        s2, ext2 = second
        out[ext2] = out.get(ext2, Fraction(0)) - s1 * s2
    return {k: v for k, v in out.items() if v}


class SL2Action:
    """Matrices of e (to degree m-2), f (to degree m+2) and the h scalar
    anchored at the degree-m component."""

    def __init__(self, case: str, N: int, m: int):
        if m < 0:
            raise BadDegree(f"negative degree {m}")
        self.case = case
        self.N = N
        self.m = m
        self.basis = component_basis(case, N, m)
        self.basis_down = component_basis(case, N, m - 2) if m >= 2 else ()
        self.basis_up = component_basis(case, N, m + 2)
        self.h = h_scalar(case, N, m)
        act_e = _e_sym if case == ORTHOGONAL else _e_ext
        act_f = _f_sym if case == ORTHOGONAL else _f_ext
        down_index = {mono: i for i, mono in enumerate(self.basis_down)}
        up_index = {mono: i for i, mono in enumerate(self.basis_up)}
        self.e: Matrix = {}
        self.f: Matrix = {}
        for col, mono in enumerate(self.basis):
            for tgt, c in act_e(mono, N).items():
                self.e[(down_index[tgt], col)] = c
            for tgt, c in act_f(mono, N).items():
                self.f[(up_index[tgt], col)] = c


def sl2_action(case: str, N: int, m: int) -> SL2Action:
    return SL2Action(case, N, m)


def _mat_mul(A: Matrix, B: Matrix) -> Matrix:
    rows: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (r, c), v in B.items():
        rows.setdefault(r, []).append((c, v))
    out: Matrix = {}
    for (r, k), va in A.items():
        for c, vb in rows.get(k, ()):
            key = (r, c)
            s = out.get(key, Fraction(0)) + va * vb
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def _mat_add(A: Matrix, B: Matrix, cb: Fraction = Fraction(1)) -> Matrix:
    out = dict(A)
    for k, v in B.items():
        s = out.get(k, Fraction(0)) + v * cb
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _identity(dim: int) -> Matrix:
    return {(i, i): Fraction(1) for i in range(dim)}


def extremal_projector(case: str, N: int, m: int) -> Matrix:
    """Matrix of p on the degree-m component (truncated at r = m//2)."""
    n = N // 2
    if case == SYMPLECTIC and m > n:
        raise NoSingularRange(
            f"symplectic component of degree {m} > n = {n} has no singular vectors"
        )
    basis = component_basis(case, N, m)
    out = _identity(len(basis))
    lam = h_scalar(case, N, m)
    for r in range(1, m // 2 + 1):
        # f^r e^r: e^r down through degrees m, m-2, .., then f^r back up,
        # each factor anchored at its source degree.
        op = _identity(len(basis))
        for step in range(r):
            op = _mat_mul(sl2_action(case, N, m - 2 * step).e, op)
        for step in range(r, 0, -1):
            op = _mat_mul(sl2_action(case, N, m - 2 * step).f, op)
        denom = Fraction(1)
        for t in range(2, r + 2):
            denom *= lam + t
        rfact = 1
        for i in range(2, r + 1):
            rfact *= i
        out = _mat_add(out, op, Fraction((-1) ** r, rfact) / denom)
    return out


def brauer_symmetrizer_component(case: str, N: int, m: int) -> Matrix:
    """Matrix of S^(m) on the degree-m component through the monomial
    isomorphism u_mono = H(e_mono) -> mono."""
    basis = component_basis(case, N, m)
    index = {mono: i for i, mono in enumerate(basis)}
    S = act_brauer(symmetrizer(m), _form(case, N))
    cols: Dict[int, Dict[int, Fraction]] = {}
    for (r, c), v in S.entries.items():
        cols.setdefault(c, {})[r] = v
    N_ = N
    out: Matrix = {}
    fact = 1
    for i in range(2, m + 1):
        fact *= i
    for col, mono in enumerate(basis):
        code = 0
        for k in reversed(mono):
            code = code * N_ + (k - 1)
        image = cols.get(code, {})
        for rcode, v in image.items():
            digits = []
            rc = rcode
            for _ in range(m):
                digits.append(rc % N_ + 1)
                rc //= N_
            key = tuple(sorted(digits))
            if case == SYMPLECTIC and len(set(digits)) != m:
                continue
            if key != tuple(digits):
                continue  # read the coefficient off the sorted representative
            if case == ORTHOGONAL:
                mult = 1
                for x in set(key):
                    cnt = key.count(x)
                    fx = 1
                    for t in range(2, cnt + 1):
                        fx *= t
                    mult *= fx
                coeff = v * Fraction(fact, mult)
            else:
                coeff = v * fact
            row = index[key]
            s = out.get((row, col), Fraction(0)) + coeff
            if s:
                out[(row, col)] = s
            else:
                out.pop((row, col), None)
    return out


def _form(case: str, N: int):
    from .tensorrep import build_form

    return build_form(case, N)


def _mat_rank(A: Matrix) -> int:
    if not A:
        return 0
    rows_idx = sorted({r for r, _ in A})
    cols_idx = sorted({c for _, c in A})
    rmap = {r: i for i, r in enumerate(rows_idx)}
    cmap = {c: j for j, c in enumerate(cols_idx)}
    mat = [[Fraction(0)] * len(cols_idx) for _ in rows_idx]
    for (r, c), v in A.items():
        mat[rmap[r]][cmap[c]] = v
    rank = 0
    row = 0
    for col in range(len(cols_idx)):
        piv = next((i for i in range(row, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        for i in range(row + 1, len(mat)):
            if mat[i][col] != 0:
                g = mat[i][col] / mat[row][col]
                for j in range(col, len(cols_idx)):
                    mat[i][j] -= g * mat[row][j]
        rank += 1
        row += 1
        if row == len(mat):
            break
    return rank


def projector_rank(case: str, N: int, m: int) -> int:
    return _mat_rank(extremal_projector(case, N, m))


def singular_kernel_dim(case: str, N: int, m: int) -> int:
    """dim ker(e) on the degree-m component."""
    act = sl2_action(case, N, m)
    dim = len(act.basis)
    return dim - _mat_rank(act.e)


def singular_trace_phi(case: str, N: int, m: int, ctx: AlgebraContext) -> TauPoly:
    """tr p Phi^(m) over the degree-m component, expanded in tau.

    Phi^(m) acts on monomials through the normalized double-symmetrized
    entry products of Phi = tau + F[-1]; in the symplectic case the result
    carries the 1/(n - m + 1) prefactor and requires m <= n.
    """
    n = N // 2
    if case == SYMPLECTIC and m > n:
        raise NoSingularRange(f"need m <= n = {n} in the symplectic case")
    if ctx.case != case or ctx.N != N:
        raise ValueError("context does not match the requested algebra")
    basis = component_basis(case, N, m)
    p = extremal_projector(case, N, m)
    # tr p Phi^(m) = sum over (u, v) of p[u, v] * Phi^(m)[v, u], where the
    # (row, col) entry of Phi^(m) carries upper indices = row monomial.
    words: Dict[tuple, Fraction] = {}
    fact = 1
    for i in range(2, m + 1):
        fact *= i
    for (u, v), q in p.items():
        row = basis[v]  # upper (i) indices
        col = basis[u]  # lower (j) indices
        if case == ORTHOGONAL:
            mult = 1
            for x in set(row):
                cnt = row.count(x)
                fx = 1
                for t in range(2, cnt + 1):
                    fx *= t
                mult *= fx
            norm = Fraction(1, mult * fact)
        else:
            norm = Fraction(1, fact)
        for sigma in permutations(range(m)):
            ssig = _perm_parity(sigma) if case == SYMPLECTIC else 1
            for pi in permutations(range(m)):
                spi = _perm_parity(pi) if case == SYMPLECTIC else 1
                coeff = q * norm * ssig * spi
                branches: List[Tuple[tuple, Fraction]] = [((), coeff)]
                for a in range(m):
                    iidx = row[sigma[a]]
                    jidx = col[pi[a]]
                    new: List[Tuple[tuple, Fraction]] = []
                    sym = ctx.canon_sym(iidx, jidx, -1)
                    for word, cw in branches:
                        if iidx == jidx:
                            new.append((word + (TAU,), cw))
                        if sym is not None:
                            cs, gs = sym
                            new.append((word + (gs,), cw * cs))
                    branches = new
                for word, cw in branches:
                    s = words.get(word, Fraction(0)) + cw
                    if s:
                        words[word] = s
                    else:
                        words.pop(word, None)
    tp = tau_order(words, ctx)
    if case == SYMPLECTIC:
        tp = tp.scale(Fraction(1, n - m + 1))
    return tp


def _perm_parity(perm: Sequence[int]) -> int:
    n = len(perm)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign
