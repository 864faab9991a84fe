"""Symbols, symbol bases and relation matrices.

A symbol is an unordered n-tuple of characters of ``A`` that generates ``A``.
Internally a character is its mixed-radix code (see
:meth:`FinAbGroup.encode`), so the canonical order of a symbol's entries is
just ascending code order, which agrees with lexicographic order on residue
tuples.  A basis keeps its symbols as a sorted ``(M, n)`` integer array.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

from .groups import Character, FinAbGroup, apply_matrix, generates

__all__ = [
    "Symbol",
    "SymbolBasis",
    "RelationMatrix",
    "canon",
    "enumerate_symbols",
    "blowup_relations",
    "general_blowup_relations",
    "antisymmetry_relations",
    "nongenerating_relations",
    "relations",
    "apply_automorphism",
    "read_triples",
]

Symbol = tuple[Character, ...]

MAX_CODE = 2**62


def canon(group: FinAbGroup, chars) -> Symbol:
    """Canonical form of a symbol: entries reduced and sorted."""
    chars = [group.char(c) for c in chars]
    return tuple(sorted(chars))


class _Tables:
    """Addition and negation tables on character codes."""

    def __init__(self, group: FinAbGroup):
        self.group = group
        q = group.order
        if group.is_cyclic:
            self.cyclic = True
            self.q = q
        else:
            self.cyclic = False
            res = np.array(group.elements(), dtype=np.int64).reshape(q, group.rank)
            self.res = res
            mods = np.array(group.invariant_factors, dtype=np.int64)
            self.neg_table = group.encode_array((-res) % mods)
            if q <= 4096:
                self.add_table = group.encode_array((res[:, None, :] + res[None, :, :]) % mods).reshape(q, q)
            else:
                self.add_table = None
            self.mods = mods

    def neg(self, a):
        if self.cyclic:
            return (-a) % self.q
        return self.neg_table[a]

    def add(self, a, b):
        if self.cyclic:
            return (a + b) % self.q
        if self.add_table is not None:
            return self.add_table[a, b]
        return self.group.encode_array((self.res[a] + self.res[b]) % self.mods)

    def sub(self, a, b):
        return self.add(a, self.neg(b))


@dataclass(eq=False)
class SymbolBasis:
    """Dense indexing of canonical symbols of length ``n`` for ``group``.

    ``admissible=True`` (the default) keeps only generating symbols.  With
    ``admissible=False`` every multiset of characters is a basis element;
    :func:`relations` then adds unit rows killing the non-generating ones,
    so the quotient is unchanged.
    """

    group: FinAbGroup
    n: int
    symbols: np.ndarray = field(repr=False)
    admissible: bool = True

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64).reshape(-1, self.n)
        self._codes = self._encode(self.symbols)

    def __len__(self):
        return len(self.symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    @cached_property
    def tables(self) -> _Tables:
        return _Tables(self.group)

    def _encode(self, S: np.ndarray) -> np.ndarray:
        q = self.group.order
        c = np.zeros(len(S), dtype=np.int64)
        for i in range(S.shape[1]):
            c = c * q + S[:, i]
        return c

    def lookup(self, S: np.ndarray, *, strict: bool = True) -> np.ndarray:
        """Indices of the rows of ``S`` (entries as codes) after sorting each row.

        Missing symbols raise unless ``strict`` is false, in which case they get ``-1``.
        """
        S = np.sort(np.asarray(S, dtype=np.int64).reshape(-1, self.n), axis=1)
        codes = self._encode(S)
        idx = np.searchsorted(self._codes, codes)
        idx = np.minimum(idx, max(len(self._codes) - 1, 0))
        ok = (self._codes[idx] == codes) if len(self._codes) else np.zeros(len(codes), bool)
        if strict and not ok.all():
            bad = S[np.flatnonzero(~ok)[0]]
            raise KeyError(f"symbol {self.format_codes(bad)} is not in the basis")
        return np.where(ok, idx, -1)

    def index(self, chars) -> int:
        """Basis index of the symbol with the given entries (any order)."""
        sym = canon(self.group, chars)
        if len(sym) != self.n:
            raise ValueError(f"symbol has {len(sym)} entries, expected {self.n}")
        return int(self.lookup(np.array([[self.group.encode(c) for c in sym]]))[0])

    def __contains__(self, chars) -> bool:
        try:
            self.index(chars)
        except KeyError:
            return False
        return True

    def symbol(self, i: int) -> Symbol:
        return tuple(self.group.decode(int(c)) for c in self.symbols[i])

    def format_codes(self, codes) -> str:
        return "[" + ",".join(self.group.format_char(self.group.decode(int(c))) for c in codes) + "]"

    def format(self, i: int) -> str:
        return self.format_codes(self.symbols[i])

    def vector(self, terms) -> dict[int, int]:
        """Sparse vector from ``[(coeff, chars), ...]`` or a list of symbols (coefficient 1)."""
        v: dict[int, int] = {}
        for t in terms:
            if isinstance(t, tuple) and len(t) == 2 and isinstance(t[0], int) and not isinstance(t[1], int):
                k, chars = t
            else:
                k, chars = 1, t
            i = self.index(chars)
            v[i] = v.get(i, 0) + k
        return {i: x for i, x in v.items() if x}

    def format_vector(self, v: dict) -> str:
        if not v:
            return "0"
        parts = []
        for i in sorted(v):
            k = v[i]
            s = self.format(i)
            parts.append(("+" if k > 0 else "-") + (f"{abs(k)}" if abs(k) != 1 else "") + s)
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out

    @cached_property
    def generating_mask(self) -> np.ndarray:
        if self.admissible:
            return np.ones(len(self), dtype=bool)
        return _generating_mask(self.group, self.symbols)


def _generating_mask(group: FinAbGroup, S: np.ndarray) -> np.ndarray:
    if group.is_cyclic:
        q = group.order
        if q == 1:
            return np.ones(len(S), dtype=bool)
        g = np.full(len(S), q, dtype=np.int64)
        for i in range(S.shape[1]):
            g = np.gcd(g, S[:, i])
        return g == 1
    cache: dict[tuple, bool] = {}
    out = np.zeros(len(S), dtype=bool)
    for k, row in enumerate(S):
        key = tuple(sorted(set(row.tolist())))
        if key not in cache:
            cache[key] = generates([group.decode(c) for c in key], group)
        out[k] = cache[key]
    return out


def enumerate_symbols(group: FinAbGroup, n: int, *, admissible: bool = True) -> SymbolBasis:
    """All canonical symbols of length ``n`` (generating ones only unless ``admissible=False``)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    q = group.order
    if math.comb(q + n - 1, n) > 5 * 10**7 or q**n >= MAX_CODE:
        raise ValueError(f"symbol space for {group.spec}, n={n} is too large")
    if group.is_cyclic and q > 1 and n <= 6:
        S = _multisets(q, n)
    else:
        S = np.array(list(itertools.combinations_with_replacement(range(q), n)), dtype=np.int64).reshape(-1, n)
    if admissible:
        S = S[_generating_mask(group, S)]
    return SymbolBasis(group, n, S, admissible=admissible)


def _multisets(q: int, n: int) -> np.ndarray:
    """Sorted n-multisets of ``range(q)`` in lexicographic order (vectorised)."""
    S = np.arange(q, dtype=np.int64).reshape(-1, 1)
    for _ in range(n - 1):
        last = S[:, -1]
        counts = q - last
        rep = np.repeat(np.arange(len(S)), counts)
        starts = np.repeat(last, counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        S = np.column_stack([S[rep], starts + offs])
    return S


# ------------------------------------------------------------ relation rows


@dataclass(eq=False)
class RelationMatrix:
    """Sparse integer matrix in CSR layout with a tag per row.

    Columns are basis indices.  ``tag_names[tags[i]]`` names the rule that
    produced row ``i`` (``"B"``, ``"B3"``, ``"A"``, ``"G"``, ...).
    """

    ncols: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    tags: np.ndarray
    tag_names: tuple[str, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def nrows(self) -> int:
        return len(self.indptr) - 1

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __len__(self):
        return self.nrows

    @classmethod
    def empty(cls, ncols: int, meta=None):
        z = np.zeros(0, dtype=np.int64)
        return cls(ncols, np.zeros(1, dtype=np.int64), z, z.copy(), z.copy(), (), dict(meta or {}))

    @classmethod
    def from_padded(cls, ncols, cols: np.ndarray, vals: np.ndarray, tag: str, meta=None, dedupe=True):
        """Build from fixed-width arrays; ``cols < 0`` marks padding.

        Repeated columns within a row are merged, zero rows dropped and, if
        ``dedupe``, exact duplicate rows removed (first occurrence kept).
        """
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64)
        if cols.ndim == 1:
            cols, vals = cols[:, None], vals[:, None]
        vals = np.where(cols < 0, 0, vals)
        cols = np.where(cols < 0, -1, cols)
        order = np.argsort(cols, axis=1, kind="stable")
        cols = np.take_along_axis(cols, order, axis=1)
        vals = np.take_along_axis(vals, order, axis=1)
        w = cols.shape[1]
        start = np.zeros_like(cols)
        for k in range(1, w):
            same = cols[:, k] == cols[:, k - 1]
            start[:, k] = np.where(same, start[:, k - 1], k)
        merged = np.zeros_like(vals)
        rows_ix = np.arange(len(cols))
        for k in range(w):
            np.add.at(merged, (rows_ix, start[:, k]), vals[:, k])
        keep_entry = (np.arange(w)[None, :] == start) & (merged != 0) & (cols >= 0)
        cols = np.where(keep_entry, cols, -1)
        vals = np.where(keep_entry, merged, 0)
        order = np.argsort(cols, axis=1, kind="stable")
        cols = np.take_along_axis(cols, order, axis=1)
        vals = np.take_along_axis(vals, order, axis=1)
        nonzero = (cols >= 0).any(axis=1)
        cols, vals = cols[nonzero], vals[nonzero]
        if dedupe and len(cols):
            key = np.concatenate([cols, vals], axis=1)
            _, first = np.unique(key, axis=0, return_index=True)
            first.sort()
            cols, vals = cols[first], vals[first]
        mask = cols >= 0
        counts = mask.sum(axis=1)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return cls(
            ncols,
            indptr,
            cols[mask].astype(np.int64),
            vals[mask].astype(np.int64),
            np.zeros(len(cols), dtype=np.int64),
            (tag,),
            dict(meta or {}),
        )

    def vstack(self, *others: "RelationMatrix") -> "RelationMatrix":
        names = list(self.tag_names)
        parts_ptr, parts_ix, parts_val, parts_tag = [self.indptr], [self.indices], [self.data], [self.tags]
        offset = self.indptr[-1]
        for o in others:
            if o.ncols != self.ncols:
                raise ValueError("column counts differ")
            remap = []
            for t in o.tag_names:
                if t not in names:
                    names.append(t)
                remap.append(names.index(t))
            parts_ptr.append(o.indptr[1:] + offset)
            offset += o.indptr[-1]
            parts_ix.append(o.indices)
            parts_val.append(o.data)
            parts_tag.append(np.asarray(remap, dtype=np.int64)[o.tags] if len(o.tags) else o.tags)
        return RelationMatrix(
            self.ncols,
            np.concatenate(parts_ptr),
            np.concatenate(parts_ix),
            np.concatenate(parts_val),
            np.concatenate(parts_tag),
            tuple(names),
            dict(self.meta),
        )

    def row(self, i: int) -> dict[int, int]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return dict(zip(self.indices[lo:hi].tolist(), self.data[lo:hi].tolist()))

    def row_dicts(self) -> list[dict[int, int]]:
        ix = self.indices.tolist()
        vs = self.data.tolist()
        ptr = self.indptr.tolist()
        return [dict(zip(ix[ptr[i] : ptr[i + 1]], vs[ptr[i] : ptr[i + 1]])) for i in range(self.nrows)]

    def tag(self, i: int) -> str:
        return self.tag_names[self.tags[i]]

    def select(self, mask) -> "RelationMatrix":
        mask = np.asarray(mask, dtype=bool)
        counts = np.diff(self.indptr)
        entry_mask = np.repeat(mask, counts)
        indptr = np.concatenate([[0], np.cumsum(counts[mask])]).astype(np.int64)
        return RelationMatrix(
            self.ncols, indptr, self.indices[entry_mask], self.data[entry_mask], self.tags[mask], self.tag_names, dict(self.meta)
        )

    def to_scipy(self):
        from scipy.sparse import csr_matrix

        return csr_matrix((self.data, self.indices, self.indptr), shape=self.shape)

    def to_dense(self) -> np.ndarray:
        A = np.zeros(self.shape, dtype=np.int64)
        for i in range(self.nrows):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            np.add.at(A[i], self.indices[lo:hi], self.data[lo:hi])
        return A

    def write_triples(self, path) -> None:
        """Write ``% ncols nrows group n`` then one ``row col value`` line per entry."""
        rows = np.repeat(np.arange(self.nrows), np.diff(self.indptr))
        with open(path, "w") as fh:
            fh.write(f"% {self.ncols} {self.nrows} {self.meta.get('group', '-')} {self.meta.get('n', '-')}\n")
            np.savetxt(fh, np.column_stack([rows, self.indices, self.data]), fmt="%d")


def read_triples(path) -> RelationMatrix:
    """Inverse of :meth:`RelationMatrix.write_triples` (tags are not stored)."""
    with open(path) as fh:
        header = fh.readline().split()
        if not header or header[0] != "%":
            raise ValueError("missing '%' header line")
        ncols, nrows = int(header[1]), int(header[2])
        meta = {"group": header[3], "n": header[4] if header[4] == "-" else int(header[4])}
        body = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    if body.size == 0:
        body = np.zeros((0, 3), dtype=np.int64)
    order = np.lexsort((body[:, 1], body[:, 0]))
    body = body[order]
    counts = np.bincount(body[:, 0], minlength=nrows)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return RelationMatrix(ncols, indptr, body[:, 1].copy(), body[:, 2].copy(), np.zeros(nrows, dtype=np.int64), ("?",), meta)


def _meta(basis: SymbolBasis) -> dict:
    return {"group": basis.group.spec, "n": basis.n}


def _rows_for_generating(basis: SymbolBasis) -> np.ndarray:
    return np.flatnonzero(basis.generating_mask)


def blowup_relations(basis: SymbolBasis) -> RelationMatrix:
    """Rows of the blow-up relation (B), one per symbol and pair of positions.

    For entries ``a1 != a2`` the row is ``[a1,a2,b] - [a1,a2-a1,b] - [a1-a2,a2,b]``;
    for ``a1 == a2`` it is ``[a,a,b] - [0,a,b]``.
    """
    n = basis.n
    if n < 2 or not len(basis):
        return RelationMatrix.empty(len(basis), _meta(basis))
    T = basis.tables
    src = _rows_for_generating(basis)
    S = basis.symbols[src]
    cols, vals = [], []
    for i, j in itertools.combinations(range(n), 2):
        a1, a2 = S[:, i], S[:, j]
        rest = np.delete(S, [i, j], axis=1)
        eq = a1 == a2
        t1 = np.column_stack([a1, T.sub(a2, a1), rest])
        t2 = np.column_stack([T.sub(a1, a2), a2, rest])
        t0 = np.column_stack([np.zeros_like(a1), a1, rest])
        i1 = basis.lookup(np.where(eq[:, None], t0, t1))
        i2 = basis.lookup(np.where(eq[:, None], t0, t2))
        i2 = np.where(eq, -1, i2)
        cols.append(np.column_stack([src, i1, i2]))
        vals.append(np.column_stack([np.ones_like(src), -np.ones_like(src), -np.ones_like(src)]))
    return RelationMatrix.from_padded(len(basis), np.concatenate(cols), np.concatenate(vals), "B", _meta(basis))


def general_blowup_relations(basis: SymbolBasis, r: int) -> RelationMatrix:
    """Rows of the relation (B_r) for every symbol and every choice of ``r`` positions.

    ``[a_1..a_r, b] - sum_i [a_1-a_i, .., a_i, .., a_r-a_i, b]`` where ``i`` runs
    over positions whose value differs from all earlier chosen values.
    """
    n = basis.n
    if not 2 <= r <= n:
        raise ValueError(f"r must satisfy 2 <= r <= n = {n}, got {r}")
    T = basis.tables
    src = _rows_for_generating(basis)
    S = basis.symbols[src]
    cols, vals = [], []
    for pos in itertools.combinations(range(n), r):
        a = S[:, list(pos)]
        rest = np.delete(S, list(pos), axis=1)
        block_c = [src]
        block_v = [np.ones_like(src)]
        for i in range(r):
            fresh = np.ones(len(S), dtype=bool)
            for k in range(i):
                fresh &= a[:, k] != a[:, i]
            ai = a[:, i]
            entries = [ai if k == i else T.sub(a[:, k], ai) for k in range(r)]
            t = np.column_stack(entries + [rest])
            idx = basis.lookup(t)
            block_c.append(np.where(fresh, idx, -1))
            block_v.append(-np.ones_like(src))
        cols.append(np.column_stack(block_c))
        vals.append(np.column_stack(block_v))
    return RelationMatrix.from_padded(len(basis), np.concatenate(cols), np.concatenate(vals), f"B{r}", _meta(basis))


def antisymmetry_relations(basis: SymbolBasis, mode: str = "single") -> RelationMatrix:
    """Rows ``[.., -a_i, ..] + [.., a_i, ..]`` defining the antisymmetric quotient.

    ``mode="single"`` negates one entry at a time; ``mode="all"`` negates
    every entry simultaneously.
    """
    if mode not in ("single", "all"):
        raise ValueError("mode must be 'single' or 'all'")
    T = basis.tables
    src = _rows_for_generating(basis)
    S = basis.symbols[src]
    cols = []
    if mode == "all":
        cols.append(np.column_stack([src, basis.lookup(T.neg(S))]))
    else:
        for i in range(basis.n):
            t = S.copy()
            t[:, i] = T.neg(S[:, i])
            cols.append(np.column_stack([src, basis.lookup(t)]))
    cols = np.concatenate(cols)
    # a row and its partner are the same relation; keep one orientation
    cols = np.sort(cols, axis=1)
    return RelationMatrix.from_padded(len(basis), cols, np.ones_like(cols), "A", _meta(basis))


def nongenerating_relations(basis: SymbolBasis) -> RelationMatrix:
    """Unit rows killing the non-generating symbols of a full multiset basis."""
    bad = np.flatnonzero(~basis.generating_mask)
    return RelationMatrix.from_padded(len(basis), bad, np.ones_like(bad), "G", _meta(basis))


def relations(basis: SymbolBasis, *, minus: bool = False, anti_mode: str = "single") -> RelationMatrix:
    """Full relation matrix for ``B_n(G)`` (or ``B_n^-(G)`` with ``minus``)."""
    parts = [blowup_relations(basis)]
    if minus:
        parts.append(antisymmetry_relations(basis, anti_mode))
    if not basis.admissible:
        parts.append(nongenerating_relations(basis))
    return parts[0].vstack(*parts[1:]) if len(parts) > 1 else parts[0]


def apply_automorphism(basis: SymbolBasis, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Action of an automorphism of ``A`` (integer matrix, row-vector convention) on the basis.

    Returns ``(perm, signs)`` with ``e_i -> signs[i] * e_{perm[i]}``; signs are all ``+1``.
    """
    g = basis.group
    sigma = np.asarray(sigma, dtype=np.int64).reshape(g.rank, g.rank)
    images = [apply_matrix(g, sigma, c) for c in g.elements()]
    if len(set(images)) != g.order:
        raise ValueError("matrix does not define an automorphism")
    table = np.array([g.encode(c) for c in images], dtype=np.int64)
    perm = basis.lookup(table[basis.symbols]) if len(basis) else np.zeros(0, dtype=np.int64)
    return perm, np.ones(len(basis), dtype=np.int64)


def permute_rows(M: RelationMatrix, perm: np.ndarray) -> RelationMatrix:
    """Relabel the columns of ``M`` by ``perm``."""
    return RelationMatrix(M.ncols, M.indptr.copy(), perm[M.indices], M.data.copy(), M.tags.copy(), M.tag_names, dict(M.meta))


def gcd_of(values) -> int:
    return reduce(math.gcd, values, 0)
