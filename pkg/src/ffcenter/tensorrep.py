"""Bilinear forms, tensor-space operators, Brauer-algebra actions and traces.

The m-fold tensor power of C^N is indexed by multi-indices in {1..N}^m,
encoded as base-N integers (slot 1 is the least significant digit).
Operators on it are sparse maps (row, col) -> Fraction.

The Brauer algebra acts by s_ij -> P_ij, e_ij -> Q_ij at w = N in the
orthogonal case and by s_ij -> -P_ij, e_ij -> -Q_ij at w = -N in the
symplectic case.  A general diagram acts through its factorization
sigma . (hook block) . tau, which fixes the overall sign in the
symplectic case.

trace_product computes tr (W M^1_1 ... M^m_m) for matrices M^a with
entries in an arbitrary associative ring (entries multiply left-to-right
in slot order); this is the workhorse behind every weighted-trace
construction in the package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .brauer import (
    BrauerDiagram,
    BrauerElement,
    PARAM,
    symmetrizer,
)
from .commpoly import CommPoly
from .exact import Pole, RatFun

ORTHOGONAL = "orthogonal"
SYMPLECTIC = "symplectic"


class OddSymplecticDimension(ValueError):
    pass


class BadSlots(ValueError):
    pass


class PoleAtSpecialization(ArithmeticError):
    """A Brauer coefficient has a pole at w = N (orthogonal) / -N (symplectic)."""


class RingMismatch(ValueError):
    pass


class OutOfDirectRange(ValueError):
    pass


class Form:
    """Nondegenerate symmetric or skew-symmetric bilinear form on C^N."""

    __slots__ = ("case", "N", "n", "G", "Ginv")

    def __init__(self, case: str, N: int, G: Sequence[Sequence[Fraction]]):
        self.case = case
        self.N = N
        self.n = N // 2
        self.G = tuple(tuple(Fraction(x) for x in row) for row in G)
        self.Ginv = _invert(self.G)
        sign = 1 if case == ORTHOGONAL else -1
        for i in range(N):
            for j in range(N):
                if self.G[i][j] != sign * self.G[j][i]:
                    raise ValueError("form matrix has the wrong symmetry")

    def g(self, i: int, j: int) -> Fraction:
        return self.G[i - 1][j - 1]

    def ginv(self, i: int, j: int) -> Fraction:
        return self.Ginv[i - 1][j - 1]

    def prime(self, i: int) -> int:
        return self.N - i + 1

    @property
    def omega(self) -> int:
        return self.N if self.case == ORTHOGONAL else -self.N

    def conj_transpose(self, A: Sequence[Sequence[Fraction]]):
        """A' = G A^t G^{-1}."""
        N = self.N
        out = [[Fraction(0)] * N for _ in range(N)]
        for i in range(N):
            for j in range(N):
                s = Fraction(0)
                for a in range(N):
                    for b in range(N):
                        s += self.G[i][a] * A[b][a] * self.Ginv[b][j]
                out[i][j] = s
        return tuple(tuple(r) for r in out)


def _invert(G) -> tuple:
    n = len(G)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(G)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        f = a[col][col]
        a[col] = [x / f for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                g = a[r][col]
                a[r] = [x - g * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def build_form(case: str, N: int) -> Form:
    """The antidiagonal form: g_ij = d_{i j'} (orthogonal),
    eps_i d_{i j'} with eps_i = 1 for i <= n, -1 for i > n (symplectic)."""
    if case == SYMPLECTIC and N % 2 != 0:
        raise OddSymplecticDimension(f"symplectic dimension must be even, got {N}")
    if N < 2:
        raise ValueError("N must be at least 2")
    n = N // 2
    G = [[Fraction(0)] * N for _ in range(N)]
    for i in range(1, N + 1):
        ip = N - i + 1
        if case == ORTHOGONAL:
            G[i - 1][ip - 1] = Fraction(1)
        else:
            G[i - 1][ip - 1] = Fraction(1) if i <= n else Fraction(-1)
    return Form(case, N, G)


def identity_form(N: int) -> Form:
    """Orthogonal form with G = identity (used for Pfaffian cross-checks)."""
    G = [[Fraction(int(i == j)) for j in range(N)] for i in range(N)]
    return Form(ORTHOGONAL, N, G)


class TensorOp:
    """Sparse exact operator on (C^N)^{x m}.

    Multi-indices (a_1..a_m), a_k in {1..N}, are encoded as
    sum (a_k - 1) N^{k-1}; entries map (row, col) to Fraction.
    """

    __slots__ = ("m", "N", "entries")

    def __init__(self, m: int, N: int, entries: Dict[Tuple[int, int], Fraction] | None = None):
        self.m = m
        self.N = N
        self.entries: Dict[Tuple[int, int], Fraction] = {}
        if entries:
            for k, v in entries.items():
                if v != 0:
                    self.entries[k] = v

    @staticmethod
    def identity(m: int, N: int) -> "TensorOp":
        return TensorOp(m, N, {(i, i): Fraction(1) for i in range(N**m)})

    def encode(self, idx: Sequence[int]) -> int:
        code = 0
        for k in reversed(idx):
            code = code * self.N + (k - 1)
        return code

    def decode(self, code: int) -> Tuple[int, ...]:
        out = []
        for _ in range(self.m):
            out.append(code % self.N + 1)
            code //= self.N
        return tuple(out)

    def _check(self, other: "TensorOp") -> None:
        if self.m != other.m or self.N != other.N:
            raise BadSlots("tensor operators on different spaces")

    def __add__(self, other: "TensorOp") -> "TensorOp":
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k, Fraction(0)) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return TensorOp(self.m, self.N, out)

    def __sub__(self, other: "TensorOp") -> "TensorOp":
        return self + other.scale(Fraction(-1))

    def scale(self, c: Fraction) -> "TensorOp":
        c = Fraction(c)
        if c == 0:
            return TensorOp(self.m, self.N)
        return TensorOp(self.m, self.N, {k: v * c for k, v in self.entries.items()})

    def __mul__(self, other: "TensorOp") -> "TensorOp":
        self._check(other)
        rows: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), v in other.entries.items():
            rows.setdefault(r, []).append((c, v))
        out: Dict[Tuple[int, int], Fraction] = {}
        for (r, k), va in self.entries.items():
            hits = rows.get(k)
            if not hits:
                continue
            for c, vb in hits:
                key = (r, c)
                s = out.get(key, Fraction(0)) + va * vb
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return TensorOp(self.m, self.N, out)

    def is_zero(self) -> bool:
        return not self.entries

    def trace(self) -> Fraction:
        return sum((v for (r, c), v in self.entries.items() if r == c), Fraction(0))

    def rank(self) -> int:
        rows_idx = sorted({r for r, _ in self.entries})
        cols_idx = sorted({c for _, c in self.entries})
        cmap = {c: j for j, c in enumerate(cols_idx)}
        mat = [[Fraction(0)] * len(cols_idx) for _ in rows_idx]
        rmap = {r: i for i, r in enumerate(rows_idx)}
        for (r, c), v in self.entries.items():
            mat[rmap[r]][cmap[c]] = v
        rank = 0
        row = 0
        for col in range(len(cols_idx)):
            piv = next((i for i in range(row, len(mat)) if mat[i][col] != 0), None)
            if piv is None:
                continue
            mat[row], mat[piv] = mat[piv], mat[row]
            head = mat[row]
            f = head[col]
            for i in range(row + 1, len(mat)):
                if mat[i][col] != 0:
                    g = mat[i][col] / f
                    for j in range(col, len(cols_idx)):
                        mat[i][j] -= g * head[j]
            rank += 1
            row += 1
            if row == len(mat):
                break
        return rank

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorOp):
            return NotImplemented
        return self.m == other.m and self.N == other.N and self.entries == other.entries


def partial_trace(op: TensorOp, slot: int) -> TensorOp:
    """Contract the chosen slot (1-based); result acts on m-1 slots."""
    if not 1 <= slot <= op.m:
        raise BadSlots(f"slot {slot} out of range 1..{op.m}")
    N = op.N
    lo = N ** (slot - 1)
    out: Dict[Tuple[int, int], Fraction] = {}
    for (r, c), v in op.entries.items():
        rd, rs = divmod(r // lo, N), r % lo
        cd, cs = divmod(c // lo, N), c % lo
        if rd[1] != cd[1]:
            continue
        nr = rd[0] * lo + rs
        nc = cd[0] * lo + cs
        key = (nr, nc)
        s = out.get(key, Fraction(0)) + v
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return TensorOp(op.m - 1, N, out)


def _perm_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a 1-based image list perm[i-1] = pi(i)."""
    n = len(perm)
    seen = [False] * (n + 1)
    sign = 1
    for i in range(1, n + 1):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j - 1]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def diagram_sign(d: BrauerDiagram, case: str) -> int:
    """Sign of the diagram action: +1 orthogonal; in the symplectic case
    sgn(sigma) sgn(tau) (-1)^k from the factorization d = sigma.B_k.tau."""
    if case == ORTHOGONAL:
        return 1
    m = d.m
    tops = d.top_hooks()
    bots = d.bottom_hooks()
    throughs = d.through_pairs()
    k = len(tops)
    sigma_inv = [0] * m
    tau = [0] * m
    pos = 0
    for a, b in tops:
        sigma_inv[pos] = a
        sigma_inv[pos + 1] = b
        pos += 2
    for t, _ in throughs:
        sigma_inv[pos] = t
        pos += 1
    pos = 0
    for c, e in bots:
        tau[pos] = c
        tau[pos + 1] = e
        pos += 2
    for _, u in throughs:
        tau[pos] = u
        pos += 1
    return _perm_sign(sigma_inv) * _perm_sign(tau) * (-1) ** k


def diagram_op(d: BrauerDiagram, form: Form) -> TensorOp:
    """Unsigned operator of a diagram: g on top hooks, g-inverse on bottom
    hooks (reversed index order), Kronecker deltas on through strands."""
    N = form.N
    m = d.m
    choices = []  # list of (positions-in-alpha, positions-in-beta, [(vals, weight)])
    for i, j in d.top_hooks():
        opts = []
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                w = form.g(a, b)
                if w:
                    opts.append(((a, b), w))
        choices.append((((i, j), ()), opts))
    for i, j in d.bottom_hooks():
        opts = []
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                w = form.ginv(b, a)
                if w:
                    opts.append(((a, b), w))
        choices.append((((), (i, j)), opts))
    for t, u in d.through_pairs():
        opts = [((x, x), Fraction(1)) for x in range(1, N + 1)]
        choices.append((((t,), (u,)), opts))

    entries: Dict[Tuple[int, int], Fraction] = {}
    alpha = [0] * (m + 1)
    beta = [0] * (m + 1)

    def rec(idx: int, weight: Fraction) -> None:
        if idx == len(choices):
            r = 0
            c = 0
            for s in range(m, 0, -1):
                r = r * N + (alpha[s] - 1)
                c = c * N + (beta[s] - 1)
            entries[(r, c)] = entries.get((r, c), Fraction(0)) + weight
            return
        (apos, bpos), opts = choices[idx]
        for vals, w in opts:
            vi = 0
            for p in apos:
                alpha[p] = vals[vi]
                vi += 1
            for p in bpos:
                beta[p] = vals[vi]
                vi += 1
            rec(idx + 1, weight * w)

    rec(0, Fraction(1))
    return TensorOp(m, N, entries)


def act_brauer(x: BrauerElement, form: Form) -> TensorOp:
    """Image of a Brauer element on (C^N)^{x m} at w = N / -N."""
    omega = form.omega
    out = TensorOp(x.m, form.N)
    for d, coeff in x.terms.items():
        try:
            c = coeff.eval(omega)
        except Pole as exc:
            raise PoleAtSpecialization(
                f"coefficient {coeff!r} of {d!r} has a pole at {PARAM} = {omega}"
            ) from exc
        if c == 0:
            continue
        if form.case == SYMPLECTIC:
            c *= diagram_sign(d, form.case)
        out = out + diagram_op(d, form).scale(c)
    return out


def pq_ops(i: int, j: int, m: int, form: Form) -> tuple[TensorOp, TensorOp]:
    """The slot operators (P_ij, Q_ij)."""
    if not (1 <= i < j <= m):
        raise BadSlots(f"need 1 <= i < j <= m, got ({i}, {j}) with m = {m}")
    from .brauer import hook_diagram, transposition_diagram

    return (
        diagram_op(transposition_diagram(m, i, j), form),
        diagram_op(hook_diagram(m, i, j), form),
    )


def _smul(q: Fraction, x):
    if hasattr(x, "scale"):
        return x.scale(q)
    return x * q


def _is_zero_elem(x) -> bool:
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return x == 0


def trace_product(weight, mats: Sequence, form: Form | None = None):
    """tr (W . M^1_1 M^2_2 ... M^m_m), contracted over all 2m indices.

    `weight` is a TensorOp, or a BrauerElement (with `form` supplied) that
    is specialized internally.  `mats` is a sequence of m NxN matrices
    (nested lists, 1-based semantics via position) over one coefficient
    ring; noncommutative entries are multiplied in slot order.  Returns a
    ring element (None if the weight or product is empty -- callers get
    the ring zero by passing at least one entry, so we return the sum or
    raise if nothing accumulated).
    """
    if isinstance(weight, BrauerElement):
        if form is None:
            raise RingMismatch("a BrauerElement weight needs a Form")
        weight = act_brauer(weight, form)
    if weight.m != len(mats):
        raise RingMismatch(f"weight acts on {weight.m} slots, got {len(mats)} matrices")
    N = weight.N
    for M in mats:
        if len(M) != N or any(len(row) != N for row in M):
            raise RingMismatch("matrix size does not match the local dimension")
    total = None
    for (r, c), q in weight.entries.items():
        term = None
        dead = False
        rr, cc = r, c
        for a in range(weight.m):
            ra = rr % N
            ca = cc % N
            rr //= N
            cc //= N
            entry = mats[a][ca][ra]  # (M_a)[beta_a, alpha_a]
            if _is_zero_elem(entry):
                dead = True
                break
            term = entry if term is None else term * entry
        if dead:
            continue
        term = _smul(q, term)
        total = term if total is None else total + term
    return total


def harmonic_variables(n: int) -> list:
    return [("h", i) for i in range(1, n + 1)]


def x_diagonal_entries(case: str, N: int) -> list[CommPoly]:
    """Diagonal of X = diag[h_1..h_n, (0,) , -h_n..-h_1] as CommPoly values."""
    n = N // 2
    out = []
    for i in range(1, N + 1):
        ip = N - i + 1
        if i <= n:
            out.append(CommPoly.var(("h", i)))
        elif i == ip:
            out.append(CommPoly.zero())
        else:
            out.append(CommPoly.var(("h", ip)).scale(-1))
    return out


def hc_leading(case: str, N: int, m: int) -> CommPoly:
    """tr S^(m) X_1 ... X_m with X the diagonal Cartan matrix, as an exact
    polynomial in the squares h_i^2.

    Orthogonal: any m.  Symplectic: m <= n only; larger m goes through the
    symplectic extension engine.
    """
    n = N // 2
    if case == SYMPLECTIC and m > n:
        raise OutOfDirectRange(
            f"direct symplectic leading term needs m <= n, got m = {m}, n = {n}"
        )
    form = build_form(case, N)
    S = act_brauer(symmetrizer(m), form)
    diag = x_diagonal_entries(case, N)
    total = CommPoly.zero()
    for (r, c), q in S.entries.items():
        if r != c:
            continue
        term = CommPoly.const(q)
        rr = r
        dead = False
        for _ in range(m):
            a = rr % N
            rr //= N
            if diag[a].is_zero():
                dead = True
                break
            term = term * diag[a]
        if not dead:
            total = total + term
    return total
