"""Exact sparse linear algebra over F_p, Q and Z.

Matrices are handled as lists of sparse rows (``dict`` column -> value).
Ranks over ``F_p`` come from a Markowitz-ordered sparse elimination that
hands the residual dense core to a word-packed routine (Python ``int``
bitsets for ``p = 2``, ``int64`` numpy arrays otherwise).  Ranks over ``Q``
are the common value of ranks modulo two random primes above ``2**30``.
Integer questions (Smith form, element orders) go through a unimodular
sparse reduction followed by a dense Smith normal form with transforms.
"""

from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from sympy import isprime, randprime

log = logging.getLogger(__name__)

__all__ = [
    "RankDisagreement",
    "GuardExceeded",
    "ModPEchelon",
    "QEchelon",
    "Cokernel",
    "SmithForm",
    "rank_mod_p",
    "rank_rational",
    "smith_normal_form",
    "smith_with_transforms",
    "in_row_space",
    "element_order",
    "gf2_echelon",
    "gf2_rank",
    "random_primes",
]

PRIME_LOW = 2**30
PRIME_HIGH = 2**31
SNF_GUARD = 5000


class RankDisagreement(RuntimeError):
    """Modular computations at different primes disagreed beyond the retry budget."""


class GuardExceeded(RuntimeError):
    """Matrix too large for exact integer elimination."""


def _coerce(M, ncols=None):
    """Return ``(rows, ncols)`` with rows as fresh ``dict`` objects of ints."""
    if hasattr(M, "row_dicts"):
        return M.row_dicts(), M.ncols
    if hasattr(M, "tocsr"):
        A = M.tocsr()
        rows = []
        for i in range(A.shape[0]):
            lo, hi = A.indptr[i], A.indptr[i + 1]
            rows.append({int(c): int(v) for c, v in zip(A.indices[lo:hi], A.data[lo:hi]) if v})
        return rows, A.shape[1]
    if isinstance(M, np.ndarray) or (isinstance(M, list) and M and isinstance(M[0], (list, tuple, np.ndarray))):
        A = np.asarray(M, dtype=object)
        if A.ndim != 2:
            raise ValueError("expected a 2-d matrix")
        return [{j: int(v) for j, v in enumerate(row) if v} for row in A], A.shape[1]
    rows = [dict(r) for r in M]
    if ncols is None:
        ncols = 1 + max((c for r in rows for c in r), default=-1)
    return rows, ncols


def _coerce_vector(v) -> dict:
    if isinstance(v, dict):
        return {int(k): int(x) for k, x in v.items() if x}
    arr = np.asarray(v)
    return {int(i): int(arr[i]) for i in np.flatnonzero(arr)}


# ---------------------------------------------------------------- GF(2) core


def gf2_echelon(rows: Iterable[int]) -> dict[int, int]:
    """Echelon basis of bit-packed GF(2) rows, keyed by each row's lowest set bit."""
    table: dict[int, int] = {}
    for x in rows:
        while x:
            lb = x & -x
            piv = table.get(lb)
            if piv is None:
                table[lb] = x
                break
            x ^= piv
    return table


def gf2_reduce(table: dict[int, int], x: int) -> int:
    rem = 0
    while x:
        lb = x & -x
        piv = table.get(lb)
        if piv is None:
            rem |= lb
            x ^= lb
        else:
            x ^= piv
    return rem


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of rows given as Python ints (bit ``j`` = column ``j``)."""
    return len(gf2_echelon(rows))


# ---------------------------------------------------------- odd-p dense core


class _DenseModP:
    """Row echelon form of a dense matrix over F_p (p < 2**31)."""

    def __init__(self, A: np.ndarray, p: int):
        self.p = p
        A = np.array(A, dtype=np.int64) % p
        m, n = A.shape
        pivots = []
        r = 0
        for c in range(n):
            if r == m:
                break
            nz = np.flatnonzero(A[r:, c])
            if not len(nz):
                continue
            k = r + nz[0]
            if k != r:
                A[[r, k]] = A[[k, r]]
            A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
            col = A[:, c].copy()
            col[r] = 0
            nzr = np.flatnonzero(col)
            if len(nzr):
                A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % p
            pivots.append(c)
            r += 1
        self.rows = A[:r]
        self.pivots = pivots

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, x: np.ndarray) -> np.ndarray:
        x = np.array(x, dtype=np.int64) % self.p
        for row, c in zip(self.rows, self.pivots):
            if x[c]:
                x = (x - x[c] * row) % self.p
        return x


# ------------------------------------------------------- sparse elimination


def _markowitz(rows: list[dict], p, dense_threshold=None):
    """Sparse elimination with Markowitz-style pivot choice.

    ``p`` is a prime or ``None`` for exact rational arithmetic.  Returns the
    list of ``(pivot column, pivot row)`` in elimination order and the rows
    left over once every remaining row is heavier than ``dense_threshold``.
    Rows are modified in place.
    """
    if p is None:
        rows = [{c: Fraction(v) for c, v in r.items() if v} for r in rows]
    else:
        rows = [{c: v % p for c, v in r.items() if v % p} for r in rows]
    cols: dict[int, set] = {}
    for ri, r in enumerate(rows):
        for c in r:
            cols.setdefault(c, set()).add(ri)
    alive = [True] * len(rows)
    heap = [(len(r), ri) for ri, r in enumerate(rows) if r]
    heapq.heapify(heap)
    pivots = []
    leftover = []
    while heap:
        w, ri = heapq.heappop(heap)
        if not alive[ri]:
            continue
        r = rows[ri]
        if not r:
            alive[ri] = False
            continue
        if len(r) != w:
            heapq.heappush(heap, (len(r), ri))
            continue
        if dense_threshold is not None and w > dense_threshold:
            heapq.heappush(heap, (w, ri))
            break
        alive[ri] = False
        c = min(r, key=lambda cc: (len(cols[cc]), cc))
        for cc in r:
            cols[cc].discard(ri)
        if p is None:
            inv = 1 / r[c]
        else:
            inv = pow(r[c], -1, p)
        others = cols.pop(c)
        items = list(r.items())
        for oi in others:
            o = rows[oi]
            f = o[c] * inv
            if p is not None:
                f %= p
            for cc, v in items:
                nv = o.get(cc, 0) - f * v
                if p is not None:
                    nv %= p
                if nv:
                    if cc not in o:
                        cols[cc].add(oi)
                    o[cc] = nv
                elif cc in o:
                    del o[cc]
                    if cc != c:
                        cols[cc].discard(oi)
            heapq.heappush(heap, (len(o), oi))
        pivots.append((c, r))
    if heap:
        leftover = [rows[ri] for ri in sorted({ri for _, ri in heap}) if alive[ri] and rows[ri]]
    return pivots, leftover


def _reduce_sparse(pivots, v: dict, p):
    v = dict(v)
    for c, r in pivots:
        x = v.get(c)
        if not x:
            continue
        f = x / r[c] if p is None else x * pow(r[c], -1, p) % p
        for cc, val in r.items():
            nv = v.get(cc, 0) - f * val
            if p is not None:
                nv %= p
            if nv:
                v[cc] = nv
            else:
                v.pop(cc, None)
    return v


class ModPEchelon:
    """Echelon form of a sparse matrix over ``F_p``.

    Supports rank, membership and normal forms (quotient coordinates) of
    vectors modulo the row space.
    """

    def __init__(self, M, p: int, *, ncols=None, dense_threshold: int = 48):
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        rows, self.ncols = _coerce(M, ncols)
        self.p = p
        self.pivots, leftover = _markowitz(rows, p, dense_threshold)
        self.core_cols = sorted({c for r in leftover for c in r})
        self._core_index = {c: i for i, c in enumerate(self.core_cols)}
        if leftover:
            log.debug("dense core: %d rows x %d cols (p=%d)", len(leftover), len(self.core_cols), p)
        if p == 2:
            ints = []
            for r in leftover:
                x = 0
                for c in r:
                    x |= 1 << self._core_index[c]
                ints.append(x)
            self._gf2 = gf2_echelon(ints)
            self._dense = None
            self.core_rank = len(self._gf2)
        elif leftover:
            A = np.zeros((len(leftover), len(self.core_cols)), dtype=np.int64)
            for i, r in enumerate(leftover):
                for c, v in r.items():
                    A[i, self._core_index[c]] = v
            if p >= 2**31:
                raise ValueError("dense core needs p < 2**31")
            self._dense = _DenseModP(A, p)
            self.core_rank = self._dense.rank
        else:
            self._dense = None
            self.core_rank = 0

    @property
    def rank(self) -> int:
        return len(self.pivots) + self.core_rank

    def reduce(self, v) -> dict:
        """Normal form of ``v`` modulo the row space (zero iff ``v`` is in it)."""
        p = self.p
        v = {c: x % p for c, x in _coerce_vector(v).items() if x % p}
        v = _reduce_sparse(self.pivots, v, p)
        core = {c: x for c, x in v.items() if c in self._core_index}
        if not core:
            return v
        rest = {c: x for c, x in v.items() if c not in self._core_index}
        if p == 2:
            x = 0
            for c in core:
                x |= 1 << self._core_index[c]
            x = gf2_reduce(self._gf2, x)
            while x:
                lb = x & -x
                rest[self.core_cols[lb.bit_length() - 1]] = 1
                x ^= lb
        else:
            arr = np.zeros(len(self.core_cols), dtype=np.int64)
            for c, val in core.items():
                arr[self._core_index[c]] = val
            if self._dense is not None:
                arr = self._dense.reduce(arr)
            for i in np.flatnonzero(arr):
                rest[self.core_cols[i]] = int(arr[i])
        return rest

    def contains(self, v) -> bool:
        return not self.reduce(v)


class QEchelon:
    """Exact echelon form over ``Q`` (fraction arithmetic); for certification."""

    def __init__(self, M, *, ncols=None):
        rows, self.ncols = _coerce(M, ncols)
        self.pivots, _ = _markowitz(rows, None)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v) -> dict:
        v = {c: Fraction(x) for c, x in _coerce_vector(v).items()}
        return _reduce_sparse(self.pivots, v, None)

    def contains(self, v) -> bool:
        return not self.reduce(v)


def random_primes(k: int, seed=0) -> list[int]:
    """``k`` distinct primes in ``(2**30, 2**31)`` drawn from a seeded generator."""
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < k:
        # sympy.randprime draws from the global RNG; seed it per call for reproducibility
        import sympy.core.random as sr

        sr.seed(rng.getrandbits(64))
        q = randprime(PRIME_LOW, PRIME_HIGH)
        if q not in out:
            out.append(q)
    return out


def rank_mod_p(M, p: int, *, ncols=None, dense_threshold: int = 48) -> int:
    """Rank over ``F_p``."""
    return ModPEchelon(M, p, ncols=ncols, dense_threshold=dense_threshold).rank


def _materialise(M, ncols):
    rows, n = _coerce(M, ncols)
    return rows, n


def rank_rational(M, *, ncols=None, seed=0, certify=False, retries: int = 2) -> int:
    """Rank over ``Q``.

    Computed modulo two random primes above ``2**30`` and returned only if the
    two ranks agree.  ``certify="prime"`` adds a third prime; ``certify="exact"``
    (or ``True``) runs exact rational elimination instead.
    """
    rows, n = _materialise(M, ncols)
    if certify in (True, "exact"):
        return QEchelon([dict(r) for r in rows], ncols=n).rank
    nprimes = 3 if certify == "prime" else 2
    for attempt in range(retries + 1):
        primes = random_primes(nprimes, seed=(seed, attempt).__hash__())
        ranks = [rank_mod_p([dict(r) for r in rows], q, ncols=n) for q in primes]
        log.debug("ranks %s at primes %s", ranks, primes)
        if len(set(ranks)) == 1:
            return ranks[0]
    raise RankDisagreement(f"ranks {ranks} at primes {primes} disagree")


def in_row_space(M, v, field="Q", *, ncols=None, seed=0, certify=False, retries: int = 2) -> bool:
    """Whether ``v`` lies in the row span of ``M`` over ``Q`` (``field="Q"``) or ``F_p`` (``field=p``).

    Over ``Q`` the answer must agree at two random primes; ``certify="exact"``
    confirms a positive answer with exact elimination.
    """
    rows, n = _materialise(M, ncols)
    if field not in ("Q", "q", None):
        p = int(str(field).lstrip("Ff"))
        return ModPEchelon(rows, p, ncols=n).contains(v)
    for attempt in range(retries + 1):
        primes = random_primes(2, seed=(seed, attempt).__hash__())
        answers = [ModPEchelon([dict(r) for r in rows], q, ncols=n).contains(v) for q in primes]
        if answers[0] == answers[1]:
            if answers[0] and certify in (True, "exact"):
                return QEchelon(rows, ncols=n).contains(v)
            return answers[0]
    raise RankDisagreement(f"membership answers {answers} at primes {primes} disagree")


# ------------------------------------------------------------------ integers


def smith_with_transforms(A, *, want_u: bool = True, want_v: bool = True):
    """Smith normal form ``D = U A V`` of a dense integer matrix (lists of ints).

    Returns ``(U, D, V)`` as lists of lists; ``U`` or ``V`` is ``None`` when
    not requested.  Diagonal entries are nonnegative with ``d_i | d_{i+1}``.
    """
    D = [[int(x) for x in row] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if want_u else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if want_v else None

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        rs, rd = D[src], D[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        if U is not None:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] -= q * us[k]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in D:
            if row[src]:
                row[dst] -= q * row[src]
        if V is not None:
            for row in V:
                if row[src]:
                    row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, D[i][t] // piv)
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, D[t][j] // piv)
                    if D[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder in row/column t onto the diagonal
                cand = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


@dataclass(frozen=True)
class SmithForm:
    """Invariant factors of a cokernel ``Z^ncols / rowspace``.

    ``invariant_factors`` lists the nonzero diagonal entries (ones included);
    ``free_rank`` is ``ncols - rank``.
    """

    invariant_factors: tuple[int, ...]
    free_rank: int

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)

    def __str__(self):
        parts = [f"Z/{d}" for d in self.torsion] + (["Z^%d" % self.free_rank] if self.free_rank else [])
        return " x ".join(parts) if parts else "0"


class Cokernel:
    """The abelian group ``Z^ncols / (row lattice)`` with element arithmetic.

    Unit pivots are eliminated sparsely (Tietze moves); the remaining core
    goes through a dense Smith normal form whose column transform gives
    coordinates of elements.
    """

    def __init__(self, M, *, ncols=None, guard: int | None = SNF_GUARD):
        rows, self.ncols = _coerce(M, ncols)
        if guard is not None and self.ncols > guard:
            raise GuardExceeded(f"{self.ncols} columns exceed the Smith-form guard of {guard}")
        self.substitutions, core_rows = self._unit_reduce(rows)
        eliminated = {c for c, _ in self.substitutions}
        self.core_cols = sorted({c for r in core_rows for c in r})
        idx = {c: i for i, c in enumerate(self.core_cols)}
        self._core_index = idx
        self.free_cols = [c for c in range(self.ncols) if c not in eliminated and c not in idx]
        if guard is not None and len(self.core_cols) > guard:
            raise GuardExceeded(f"dense core of {len(self.core_cols)} columns exceeds the guard")
        dense = [[0] * len(self.core_cols) for _ in core_rows]
        for i, r in enumerate(core_rows):
            for c, v in r.items():
                dense[i][idx[c]] = v
        if dense:
            _, D, V = smith_with_transforms(dense, want_u=False)
            diag = [D[i][i] for i in range(min(len(D), len(self.core_cols))) if D[i][i]]
        else:
            V = [[int(i == j) for j in range(len(self.core_cols))] for i in range(len(self.core_cols))]
            diag = []
        self._V = V
        self._diag = diag
        ones = len(self.substitutions)
        self.smith = SmithForm(
            invariant_factors=(1,) * ones + tuple(diag),
            free_rank=self.ncols - ones - len(diag),
        )

    @staticmethod
    def _unit_reduce(rows):
        rows = [{c: v for c, v in r.items() if v} for r in rows]
        cols: dict[int, set] = {}
        for ri, r in enumerate(rows):
            for c in r:
                cols.setdefault(c, set()).add(ri)
        alive = [bool(r) for r in rows]
        heap = [(len(r), ri) for ri, r in enumerate(rows) if r]
        heapq.heapify(heap)
        stuck: set[int] = set()
        subs = []
        while heap:
            w, ri = heapq.heappop(heap)
            if not alive[ri]:
                continue
            r = rows[ri]
            if not r:
                alive[ri] = False
                continue
            if len(r) != w:
                heapq.heappush(heap, (len(r), ri))
                continue
            units = [c for c, v in r.items() if v in (1, -1)]
            if not units:
                stuck.add(ri)
                continue
            stuck.discard(ri)
            c = min(units, key=lambda cc: (len(cols[cc]), cc))
            alive[ri] = False
            for cc in r:
                cols[cc].discard(ri)
            sign = r[c]
            others = cols.pop(c)
            items = list(r.items())
            for oi in others:
                o = rows[oi]
                f = o[c] * sign
                for cc, v in items:
                    nv = o.get(cc, 0) - f * v
                    if nv:
                        if cc not in o:
                            cols[cc].add(oi)
                        o[cc] = nv
                    elif cc in o:
                        del o[cc]
                        if cc != c:
                            cols[cc].discard(oi)
                if o:
                    heapq.heappush(heap, (len(o), oi))
                else:
                    alive[oi] = False
                    stuck.discard(oi)
            # e_c = -sign * sum_{j != c} r_j e_j in the quotient
            subs.append((c, {cc: -sign * v for cc, v in items if cc != c}))
        core = [rows[ri] for ri in sorted(stuck) if alive[ri] and rows[ri]]
        return subs, core

    def _reduce(self, v) -> dict:
        v = dict(_coerce_vector(v))
        for c, expr in self.substitutions:
            x = v.pop(c, 0)
            if x:
                for cc, val in expr.items():
                    nv = v.get(cc, 0) + x * val
                    if nv:
                        v[cc] = nv
                    else:
                        v.pop(cc, None)
        return v

    def coordinates(self, v):
        """``(torsion_coords, free_coords)`` of ``v``: residues modulo each ``d > 1`` and free integers."""
        v = self._reduce(v)
        n = len(self.core_cols)
        w = [0] * n
        for c, x in v.items():
            i = self._core_index.get(c)
            if i is not None:
                row = self._V[i]
                for j in range(n):
                    if row[j]:
                        w[j] += x * row[j]
        tors = [w[i] % d for i, d in enumerate(self._diag) if d > 1]
        free = w[len(self._diag):] + [v.get(c, 0) for c in self.free_cols]
        return tors, free

    def order(self, v):
        """Order of ``v`` in the cokernel (``math.inf`` if infinite)."""
        v = self._reduce(v)
        if any(v.get(c) for c in self.free_cols):
            return math.inf
        n = len(self.core_cols)
        w = [0] * n
        for c, x in v.items():
            i = self._core_index.get(c)
            if i is None:
                continue
            row = self._V[i]
            for j in range(n):
                if row[j]:
                    w[j] += x * row[j]
        if any(w[len(self._diag):]):
            return math.inf
        order = 1
        for d, x in zip(self._diag, w):
            if d > 1:
                k = d // math.gcd(d, x)
                order = order * k // math.gcd(order, k)
        return order

    def is_zero(self, v) -> bool:
        return self.order(v) == 1


def smith_normal_form(M, *, ncols=None, guard: int | None = SNF_GUARD) -> SmithForm:
    """Invariant factors and free rank of ``Z^ncols / rowspace(M)``."""
    return Cokernel(M, ncols=ncols, guard=guard).smith


def element_order(M, v, *, ncols=None, guard: int | None = SNF_GUARD):
    """Order of ``v + rowspace(M)`` in the integer cokernel (``math.inf`` if infinite)."""
    return Cokernel(M, ncols=ncols, guard=guard).order(v)
