"""Segal-Sugawara vectors, the symplectic extension engine, noncommutative
Pfaffians, and the annihilation verifier.

The vectors phi_{m0}..phi_{mm} come from the tau-expansion of the
symmetrizer-weighted trace of Phi_1 ... Phi_m with Phi = tau + F[-1].
Orthogonally (and symplectically for m <= n) the symmetrizer image on
tensor space is finite at the specialization and the trace is computed
directly.  For n < m <= 2n the specialization does not exist; there the
trace is *defined* through two recurrence relations that peel the last
slot, one of which distributes the peeled skew matrix into the earlier
slots (contaminating them), with coefficients rational in a symbolic
parameter v.  Peeling continues until the word reaches the size at which
the symmetrizer specializes (min(n, m) slots); the residual traces are
then computed concretely, the rational coefficients are evaluated at
v = n, and the results are summed.  Intermediate coefficients carry
(v - m' + 2) denominators that are singular at v = n for m' = n + 2, but
they telescope against the matching numerators so that every assembled
coefficient, the 1/(v - m + 1) prefactor included, is regular at v = n.
Contaminated slots are never peeled; a clean slot always exists above
the stop size for m <= 2n, because each skew peel costs at most two
clean slots while reaching size n takes only m - n peels.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from .brauer import symmetrizer
from .commpoly import CommPoly
from .envelop import (
    TAU,
    AlgebraContext,
    TauPoly,
    UElement,
    symbol,  # re-exported: the symbol map lives with the PBW engine
    tau_order,
    vacuum_apply,
    vacuum_reduce,
)
from .exact import RatFun, UniPoly
from .tensorrep import (
    ORTHOGONAL,
    OutOfDirectRange,
    SYMPLECTIC,
    TensorOp,
    act_brauer,
    _perm_sign,
)

__all__ = [
    "phi_orthogonal",
    "phi_symplectic_direct",
    "phi_symplectic_extended",
    "phi_vector",
    "reduce_trace_symplectic",
    "extended_scalar_trace",
    "pfaffian",
    "pfaffian_restricted",
    "verify_ss",
    "SSReport",
    "symbol",
    "skew_slot_matrices",
    "symplectic_slot_paths",
]

NU = "nu"

ID_TAG = "id"
SKEW_TAG = "skew"
PROD_TAG = "prod"

Matrix = Tuple[Tuple[Fraction, ...], ...]
Slot = Tuple[str, Optional[Matrix]]  # identity slots carry no matrix


class NotRegular(ArithmeticError):
    """The reduced scalar trace has a pole at v = n."""


class NoPeelableSlot(RuntimeError):
    """Every remaining slot is contaminated (cannot occur for m <= 2n)."""


def _mat_from(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n = len(A)
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(n)), Fraction(0)) for j in range(n))
        for i in range(n)
    )


def _mat_trace(A: Matrix) -> Fraction:
    return sum((A[i][i] for i in range(len(A))), Fraction(0))


def _is_skew(A: Matrix, ctx: AlgebraContext) -> bool:
    return ctx.form.conj_transpose(A) == tuple(tuple(-x for x in row) for row in A)


_reduce_cache: Dict[tuple, Dict[tuple, RatFun]] = {}
_sym_image_cache: Dict[Tuple[int, int], object] = {}


def reduce_trace_symplectic(
    slots: Sequence[Slot], stop: int, scheduler: str = "last"
) -> Dict[tuple, RatFun]:
    """Peel tr S^(m) M_1 ... M_m down to residual words of `stop` slots.

    Each slot is ("id", None), ("skew", M) with M + M' = 0, or
    ("prod", M) for contaminated slots created by the skew rule; only
    clean slots are peeled, after being permuted into the last position
    (the symmetrizer commutes with slot permutations and the trace is
    conjugation-invariant, so slot order is immaterial).  Returns the
    expansion {residual word: coefficient in Q(v)} such that

        tr S^(m)(slots) = sum coeff(v) * tr S^(stop)(residual word),

    the raw recurrences being

        tr S^(m)(.., 1_m) = (v-m+1)(2v-m+3)/(m(v-m+2)) tr S^(m-1)(..)
        tr S^(m)(.., C_m) = -(v-m+1)/(m(v-m+2)) sum_i tr S^(m-1)(.. C->i).

    Individual coefficients carry (v-m'+2) denominators; those poles
    telescope away once the 1/(v-m+1) prefactor of the defining
    expression is attached (see extended_scalar_trace).

    `scheduler` picks which clean slot is peeled ("last" or "first"
    among the clean ones); the assembled value at v = n is scheduler
    independent.
    """
    slots = tuple(slots)
    m = len(slots)
    if m == 0:
        raise ValueError("need at least one slot")
    if m <= stop:
        return {_canon_word(slots): RatFun.const(1, NU)}

    key = (scheduler, stop, _canon_word(slots))
    cached = _reduce_cache.get(key)
    if cached is not None:
        return cached

    clean = [i for i, (tag, _) in enumerate(slots) if tag != PROD_TAG]
    if not clean:
        raise NoPeelableSlot(f"all {m} slots contaminated above the stop size")
    pick = clean[-1] if scheduler == "last" else clean[0]
    rest = slots[:pick] + slots[pick + 1 :]
    tag, C = slots[pick]
    front = RatFun(
        UniPoly([Fraction(1 - m), Fraction(1)], NU),
        UniPoly([Fraction(2 - m), Fraction(1)], NU).scale(m),
    )  # (v-m+1)/(m(v-m+2))
    out: Dict[tuple, RatFun] = {}
    if tag == ID_TAG:
        coeff = front * RatFun.from_poly(UniPoly([Fraction(3 - m), Fraction(2)], NU))
        for word, c in reduce_trace_symplectic(rest, stop, scheduler).items():
            _acc_ratfun(out, word, c * coeff)
    else:
        coeff = -front
        for i in range(m - 1):
            itag, Mi = rest[i]
            if itag == ID_TAG:
                new_slot = (SKEW_TAG, C)
            else:
                new_slot = (PROD_TAG, _mat_mul(Mi, C))
            sub = rest[:i] + (new_slot,) + rest[i + 1 :]
            for word, c in reduce_trace_symplectic(sub, stop, scheduler).items():
                _acc_ratfun(out, word, c * coeff)
    _reduce_cache[key] = out
    return out


def _acc_ratfun(acc: Dict[tuple, RatFun], key: tuple, val: RatFun) -> None:
    cur = acc.get(key)
    s = val if cur is None else cur + val
    if s.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = s


def _canon_word(slots: Sequence[Slot]) -> tuple:
    return tuple(sorted(slots, key=_slot_key))


def _slot_key(slot: Slot):
    tag, M = slot
    return (tag, M if M is not None else ())


def _residual_trace(word: Sequence[Slot], n: int) -> Fraction:
    """tr S^(m')(word) evaluated concretely on (C^{2n})^{x m'}, m' <= n+1."""
    m = len(word)
    key = (n, m)
    S = _sym_image_cache.get(key)
    if S is None:
        from .tensorrep import build_form

        S = act_brauer(symmetrizer(m), build_form(SYMPLECTIC, 2 * n))
        _sym_image_cache[key] = S
    N = 2 * n
    total = Fraction(0)
    for (r, c), q in S.entries.items():
        t = q
        rr, cc = r, c
        for a in range(m):
            ra = rr % N
            ca = cc % N
            rr //= N
            cc //= N
            tag, M = word[a]
            if tag == ID_TAG:
                if ra != ca:
                    t = Fraction(0)
                    break
            else:
                t *= M[ca][ra]
                if t == 0:
                    break
        total += t
    return total


def extended_scalar_trace(
    slots: Sequence[Slot], n: int, scheduler: str = "last"
) -> Fraction:
    """(1/(v-m+1)) tr S^(m)(slots) evaluated at v = n via the extension.

    Residual words at the stop size min(n, m) are traced concretely; every
    assembled coefficient, prefactor included, must be regular at v = n
    (the telescoping product of the peel coefficients guarantees it, and
    NotRegular flags any violation).
    """
    m = len(slots)
    stop = min(n, m)
    pref = RatFun(
        UniPoly.const(1, NU), UniPoly([Fraction(1 - m), Fraction(1)], NU)
    )  # 1/(v-m+1)
    total = Fraction(0)
    for word, c in reduce_trace_symplectic(slots, stop, scheduler).items():
        full = c * pref
        if full.den.eval(n) == 0:
            raise NotRegular(f"assembled coefficient has a pole at {NU} = {n}")
        total += full.eval(n) * _residual_trace(word, n)
    return total


def skew_slot_matrices(ctx: AlgebraContext) -> Dict[Tuple[int, int], Matrix]:
    """Canonical-pair matrices ft_pq with F[r] = sum ft_pq x F_pq[r].

    ft_pq = (1/2) sum over all (i,j) rewriting to (p,q) of c_ij f_ij with
    f_ij = e_ij - sum_kl ginv_ik g_lj e_lk; each satisfies ft + ft' = 0.
    """
    N = ctx.N
    form = ctx.form
    mats: Dict[Tuple[int, int], List[List[Fraction]]] = {
        pq: [[Fraction(0)] * N for _ in range(N)] for pq in ctx.pairs
    }
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            v = ctx.canon_pair(i, j)
            if v is None:
                continue
            c, pq = v
            tgt = mats[pq]
            tgt[i - 1][j - 1] += c * Fraction(1, 2)
            for k in range(1, N + 1):
                gik = form.ginv(i, k)
                if gik == 0:
                    continue
                for l in range(1, N + 1):
                    glj = form.g(l, j)
                    if glj:
                        tgt[l - 1][k - 1] -= c * Fraction(1, 2) * gik * glj
    out = {}
    for pq, rows in mats.items():
        M = _mat_from(rows)
        if any(any(x for x in row) for row in M):
            if not _is_skew(M, ctx):
                raise AssertionError(f"slot matrix for {pq} is not skew")
            out[pq] = M
    return out


def symplectic_slot_paths(
    ctx: AlgebraContext,
    slot_options: Sequence[Sequence[Tuple[Slot, object]]],
    scheduler: str = "last",
) -> Dict[tuple, Fraction]:
    """Expand tr S^(m)(sum-decomposed slots)/(v-m+1) over all slot choices.

    Each slot carries options ((tag, matrix), letter); the return maps the
    letter path (one letter per slot, in slot order) to the exact scalar
    weight of its tagged word at v = n.
    """
    n = ctx.n
    out: Dict[tuple, Fraction] = {}

    def rec(a: int, slots: tuple, letters: tuple) -> None:
        if a == len(slot_options):
            q = extended_scalar_trace(slots, n, scheduler)
            if q:
                out[letters] = out.get(letters, Fraction(0)) + q
            return
        for slot, letter in slot_options[a]:
            rec(a + 1, slots + (slot,), letters + (letter,))

    rec(0, (), ())
    return out


def _phi_from_weight(
    ctx: AlgebraContext, m: int, weight: TensorOp, prefactor: Fraction
) -> TauPoly:
    """tau-expansion of tr(weight . Phi_1 ... Phi_m), Phi = tau + F[-1]."""
    N = ctx.N
    words: Dict[tuple, Fraction] = {}
    for (r, c), q in weight.entries.items():
        branches: List[Tuple[tuple, Fraction]] = [((), q)]
        rr, cc = r, c
        for _ in range(m):
            beta = cc % N + 1
            alpha = rr % N + 1
            rr //= N
            cc //= N
            new: List[Tuple[tuple, Fraction]] = []
            sym = ctx.canon_sym(beta, alpha, -1)
            for word, coeff in branches:
                if beta == alpha:
                    new.append((word + (TAU,), coeff))
                if sym is not None:
                    s, gs = sym
                    new.append((word + (gs,), coeff * s))
            branches = new
        for word, coeff in branches:
            s = words.get(word, Fraction(0)) + coeff
            if s:
                words[word] = s
            else:
                words.pop(word, None)
    return tau_order(words, ctx).scale(prefactor)


def phi_orthogonal(N: int, m: int, ctx: AlgebraContext | None = None) -> TauPoly:
    """tr S^(m) Phi_1...Phi_m = phi_m0 tau^m + ... + phi_mm for o_N."""
    if ctx is None:
        ctx = AlgebraContext(ORTHOGONAL, N)
    if ctx.case != ORTHOGONAL or ctx.N != N:
        raise ValueError("context does not match o_N")
    weight = act_brauer(symmetrizer(m), ctx.form)
    return _phi_from_weight(ctx, m, weight, Fraction(1))


def phi_symplectic_direct(n: int, m: int, ctx: AlgebraContext | None = None) -> TauPoly:
    """Direct specialization for sp_2n, valid for m <= n, including the
    1/(n-m+1) prefactor."""
    if ctx is None:
        ctx = AlgebraContext(SYMPLECTIC, 2 * n)
    if ctx.case != SYMPLECTIC or ctx.N != 2 * n:
        raise ValueError("context does not match sp_2n")
    if m > n:
        raise OutOfDirectRange(
            f"direct symplectic construction needs m <= n, got m = {m}"
        )
    weight = act_brauer(symmetrizer(m), ctx.form)
    return _phi_from_weight(ctx, m, weight, Fraction(1, n - m + 1))


def phi_symplectic_extended(
    n: int, m: int, ctx: AlgebraContext | None = None, scheduler: str = "last"
) -> TauPoly:
    """The extension-engine construction for sp_2n, defined for all
    1 <= m <= 2n; agrees with the direct formula for m <= n."""
    if ctx is None:
        ctx = AlgebraContext(SYMPLECTIC, 2 * n)
    if ctx.case != SYMPLECTIC or ctx.N != 2 * n:
        raise ValueError("context does not match sp_2n")
    if not 1 <= m <= 2 * n:
        raise OutOfDirectRange(f"extension engine needs 1 <= m <= 2n, got m = {m}")
    ft = skew_slot_matrices(ctx)
    options = [
        ((ID_TAG, None), TAU),
    ] + [((SKEW_TAG, M), (-1, p, q)) for (p, q), M in sorted(ft.items())]
    paths = symplectic_slot_paths(ctx, [options] * m, scheduler)
    return tau_order(paths, ctx)


def phi_vector(case: str, N: int, m: int, k: int, ctx: AlgebraContext | None = None) -> UElement:
    """phi_{mk}: the coefficient of tau^(m-k) of the appropriate expansion."""
    if case == ORTHOGONAL:
        tp = phi_orthogonal(N, m, ctx)
    else:
        n = N // 2
        tp = phi_symplectic_direct(n, m, ctx) if m <= n else phi_symplectic_extended(n, m, ctx)
    return tp.coeff(m - k)


def pfaffian(ctx: AlgebraContext) -> UElement:
    """Pf(F[-1] G) = (1/(2^n n!)) sum_sigma sgn sigma
    Ft_{s(1)s(2)}[-1] ... Ft_{s(2n-1)s(2n)}[-1] for o_2n."""
    if ctx.case != ORTHOGONAL or ctx.N % 2 != 0:
        raise ValueError("Pfaffian needs o_2n")
    n = ctx.N // 2
    entries = _ftilde_entries(ctx)
    fact = 1
    for i in range(2, n + 1):
        fact *= i
    total = UElement.zero(ctx)
    acc: Dict[tuple, Fraction] = {}
    for perm in permutations(range(1, 2 * n + 1)):
        sgn = _perm_sgn(perm)
        coeff = Fraction(sgn)
        word = []
        dead = False
        for k in range(n):
            e = entries[(perm[2 * k], perm[2 * k + 1])]
            if e is None:
                dead = True
                break
            c, s = e
            coeff *= c
            word.append(s)
        if dead:
            continue
        w = tuple(word)
        sacc = acc.get(w, Fraction(0)) + coeff
        if sacc:
            acc[w] = sacc
        else:
            acc.pop(w, None)
    for w, c in acc.items():
        total = total + UElement(ctx, ctx.normalize(w)).scale(c)
    return total.scale(Fraction(1, 2**n * fact))


def pfaffian_restricted(ctx: AlgebraContext) -> UElement:
    """The A_{2n}-restricted sum (sigma(2k-1) < sigma(2k), ascending odd
    positions); equals the full sum when G = identity."""
    if ctx.case != ORTHOGONAL or ctx.N % 2 != 0:
        raise ValueError("Pfaffian needs o_2n")
    n = ctx.N // 2
    entries = _ftilde_entries(ctx)
    total: Dict[tuple, Fraction] = {}

    def rec(remaining: tuple, word: tuple, coeff: Fraction, perm: tuple) -> None:
        if not remaining:
            sgn = _perm_sgn(perm)
            w = total.get(word, Fraction(0)) + coeff * sgn
            if w:
                total[word] = w
            else:
                total.pop(word, None)
            return
        a = remaining[0]
        for b in remaining[1:]:
            e = entries[(a, b)]
            if e is None:
                continue
            c, s = e
            rest = tuple(x for x in remaining if x != a and x != b)
            rec(rest, word + (s,), coeff * c, perm + (a, b))

    rec(tuple(range(1, 2 * n + 1)), (), Fraction(1), ())
    out = UElement.zero(ctx)
    for w, c in total.items():
        out = out + UElement(ctx, ctx.normalize(w)).scale(c)
    return out


def _ftilde_entries(ctx: AlgebraContext):
    """Ft_ij = (F[-1] G)_ij = sum_k F_ik[-1] g_kj, as (coeff, symbol) or None."""
    N = ctx.N
    out: Dict[Tuple[int, int], Optional[Tuple[Fraction, tuple]]] = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            acc: Dict[tuple, Fraction] = {}
            for k in range(1, N + 1):
                g = ctx.form.g(k, j)
                if g == 0:
                    continue
                v = ctx.canon_sym(i, k, -1)
                if v is None:
                    continue
                c, s = v
                acc[s] = acc.get(s, Fraction(0)) + c * g
            acc = {s: c for s, c in acc.items() if c}
            if not acc:
                out[(i, j)] = None
            elif len(acc) == 1:
                (s, c), = acc.items()
                out[(i, j)] = (c, s)
            else:
                raise AssertionError("nonmonomial form in Pfaffian entries")
    return out


def _perm_sgn(perm: Sequence[int]) -> int:
    return _perm_sign(perm)


class SSReport:
    """Residuals of the nonnegative-mode probes against a candidate vector."""

    def __init__(self, vector_id: str, residuals: List[Tuple[tuple, int, UElement]]):
        self.vector_id = vector_id
        self.residuals = residuals

    @property
    def passed(self) -> bool:
        return all(res.is_zero() for _, _, res in self.residuals)

    def failing(self) -> List[Tuple[tuple, int]]:
        return [(pair, s) for pair, s, res in self.residuals if not res.is_zero()]

    def to_json(self) -> dict:
        return {
            "vector": self.vector_id,
            "pass": self.passed,
            "failing_probes": [
                {"generator": list(pair), "mode": s} for pair, s in self.failing()
            ],
            "probes": len(self.residuals),
        }


def verify_ss(vec: UElement, ctx: AlgebraContext | None = None,
              vector_id: str = "phi", modes: Sequence[int] = (0, 1)) -> SSReport:
    """Apply every canonical F_ij[s], s in `modes`, through the vacuum
    module at the context level and report the residuals.

    The candidate must involve only negative modes.
    """
    if ctx is None:
        ctx = vec.ctx
    if any(s[0] >= 0 for w in vec.terms for s in w):
        raise ValueError("candidate vector must have only negative modes")
    if ctx is not vec.ctx:
        vec = UElement(ctx, dict(vec.terms))
    residuals = []
    for (i, j) in ctx.pairs:
        for s in modes:
            probe = UElement(ctx, {((s, i, j),): Fraction(1)})
            residuals.append(((i, j), s, vacuum_apply(probe, vec)))
    return SSReport(vector_id, residuals)
