"""Multiplication, comultiplication and zero-padding between symbol groups.

Vectors are sparse ``dict`` objects ``{basis index: coefficient}``.  Tensors in
``S_{n'}(G') (x) S_{n''}(G'')`` are :class:`Tensor` objects holding
``{(left index, right index): coefficient}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .groups import DualSurjection, generates
from .linalg import ModPEchelon, random_primes
from .symbols import SymbolBasis, enumerate_symbols, relations

__all__ = [
    "Tensor",
    "multiply",
    "comultiply",
    "pad_with_zeros",
    "tensor_is_zero",
    "quotient_coordinates",
]


def _add(v: dict, k, c):
    x = v.get(k, 0) + c
    if x:
        v[k] = x
    else:
        v.pop(k, None)


@dataclass
class Tensor:
    left: SymbolBasis
    right: SymbolBasis
    terms: dict = field(default_factory=dict)

    def add(self, i: int, j: int, c: int):
        _add(self.terms, (i, j), c)

    def triples(self) -> list[tuple[int, int, int]]:
        return sorted((i, j, c) for (i, j), c in self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def left_factors(self) -> dict[int, dict]:
        """Group terms by left index: ``{i: right vector}``."""
        out: dict[int, dict] = {}
        for (i, j), c in self.terms.items():
            out.setdefault(i, {})[j] = c
        return out

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, vec in sorted(self.left_factors().items()):
            parts.append(f"{self.left.format(i)} (x) ({self.right.format_vector(vec)})")
        return " + ".join(parts)


def multiply(
    s: DualSurjection,
    left_basis: SymbolBasis,
    left: dict,
    right_basis: SymbolBasis,
    right: dict,
    target: SymbolBasis | None = None,
) -> dict:
    """Bilinear map ``S_{n'}(G') x S_{n''}(G'') -> S_n(G)`` summing over lifts of the left entries.

    It respects the antisymmetric relations on both sides.  On the plain
    quotients the relation ``[a,a,..] = [0,a,..]`` in the left factor is not
    always preserved (e.g. ``C_9 -> C_3`` with ``n' = 2``), so check
    membership before relying on it there.
    """
    if left_basis.group != s.target or right_basis.group != s.kernel:
        raise ValueError("bases do not match the sequence")
    n = left_basis.n + right_basis.n
    if target is None:
        target = enumerate_symbols(s.source, n)
    if target.n != n:
        raise ValueError(f"target basis has n={target.n}, expected {n}")
    g = s.source
    out: dict[int, int] = {}
    for i, ci in left.items():
        lifts = [s._fibres[a] for a in left_basis.symbol(i)]
        for j, cj in right.items():
            tail = [s.embed(b) for b in right_basis.symbol(j)]
            for choice in itertools.product(*lifts):
                chars = list(choice) + tail
                if not generates(chars, g):
                    raise AssertionError(f"lifted symbol {chars} does not generate {g.spec}")
                _add(out, target.index(chars), ci * cj)
    return out


def comultiply(
    s: DualSurjection,
    basis: SymbolBasis,
    v: dict,
    n_left: int,
    left_basis: SymbolBasis | None = None,
    right_basis: SymbolBasis | None = None,
) -> Tensor:
    """Comultiplication on generators, extended linearly.

    A symbol maps to the sum over splittings ``I' | I''`` of positions with
    ``|I'| = n_left`` such that the entries on ``I''`` lie in ``A''`` and
    generate it, of ``[a_I' mod A''] (x) [a_I'']``.  The result is meaningful
    modulo antisymmetry on both sides.
    """
    n_right = basis.n - n_left
    if not 0 <= n_left <= basis.n:
        raise ValueError("n_left out of range")
    if left_basis is None:
        left_basis = enumerate_symbols(s.target, n_left)
    if right_basis is None:
        right_basis = enumerate_symbols(s.kernel, n_right)
    T = Tensor(left_basis, right_basis)
    for k, c in v.items():
        sym = basis.symbol(k)
        for I2 in itertools.combinations(range(basis.n), n_right):
            if not all(s.in_kernel(sym[j]) for j in I2):
                continue
            right = [s.unembed(sym[j]) for j in I2]
            if not generates(right, s.kernel):
                continue
            left = [s.project(sym[j]) for j in range(basis.n) if j not in I2]
            if not generates(left, s.target):
                raise AssertionError(f"projected entries {left} do not generate {s.target.spec}")
            T.add(left_basis.index(left), right_basis.index(right), c)
    return T


def pad_with_zeros(source: SymbolBasis, v: dict, target: SymbolBasis) -> dict:
    """Append ``target.n - source.n`` zero entries to every symbol of ``v``."""
    if source.group != target.group or source.n > target.n:
        raise ValueError("incompatible bases")
    zeros = [source.group.zero] * (target.n - source.n)
    out: dict[int, int] = {}
    for i, c in v.items():
        _add(out, target.index(list(source.symbol(i)) + zeros), c)
    return out


def quotient_coordinates(ech: ModPEchelon, indices) -> dict[int, dict]:
    """Normal forms of basis vectors ``e_i`` modulo the row space of ``ech``."""
    return {i: ech.reduce({i: 1}) for i in indices}


def tensor_is_zero(T: Tensor, p, *, minus: bool = True, seed=0, left_rel=None, right_rel=None) -> bool:
    """Whether ``T`` vanishes in ``B'(x)B''`` over ``F_p`` (``p`` prime) or ``Q`` (``p="Q"``).

    Uses the antisymmetric quotients on both sides unless ``minus`` is false.
    Over ``Q`` the answer must agree at two random large primes.
    """
    if p in ("Q", "q", None):
        answers = {tensor_is_zero(T, q, minus=minus, left_rel=left_rel, right_rel=right_rel) for q in random_primes(2, seed)}
        if len(answers) != 1:
            raise RuntimeError("tensor vanishing differs between primes")
        return answers.pop()
    p = int(p)
    if left_rel is None:
        left_rel = relations(T.left, minus=minus)
    if right_rel is None:
        right_rel = relations(T.right, minus=minus)
    le = ModPEchelon(left_rel, p)
    re_ = ModPEchelon(right_rel, p)
    lnf = quotient_coordinates(le, {i for i, _ in T.terms})
    rnf = quotient_coordinates(re_, {j for _, j in T.terms})
    lcols = sorted({c for v in lnf.values() for c in v})
    rcols = sorted({c for v in rnf.values() for c in v})
    if not lcols or not rcols:
        return True
    li = {c: k for k, c in enumerate(lcols)}
    ri = {c: k for k, c in enumerate(rcols)}
    acc = np.zeros((len(lcols), len(rcols)), dtype=object)
    for (i, j), c in T.terms.items():
        for a, x in lnf[i].items():
            for b, y in rnf[j].items():
                acc[li[a], ri[b]] += c * x * y
    return all(int(x) % p == 0 for x in acc.flat)
