"""Finite abelian groups, their character groups, and dual surjections.

A finite abelian group is stored by its invariant factors ``n_1 | n_2 | ...``.
The character group ``A = Hom(G, G_m)`` is (non-canonically) isomorphic to
``G``; we use the same :class:`FinAbGroup` for both and write characters as
residue tuples ``(a_1, ..., a_k)`` with ``0 <= a_i < n_i``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd, prod

import numpy as np
from sympy import factorint

Character = tuple[int, ...]

__all__ = [
    "Character",
    "FinAbGroup",
    "DualSurjection",
    "cyclic",
    "product",
    "parse_group",
    "generates",
    "enumerate_lifts",
    "cyclic_sequence",
    "dual_sequence",
    "automorphisms",
]


def _invariant_factors(orders) -> tuple[int, ...]:
    """Normal form of a product of cyclic groups of the given orders."""
    by_prime: dict[int, list[int]] = {}
    for n in orders:
        if n <= 0:
            raise ValueError(f"cyclic factor order must be positive, got {n}")
        for p, e in factorint(n).items():
            by_prime.setdefault(p, []).append(p**e)
    if not by_prime:
        return ()
    length = max(len(v) for v in by_prime.values())
    factors = [1] * length
    for powers in by_prime.values():
        powers.sort()
        for i, q in enumerate(powers):
            factors[length - len(powers) + i] *= q
    return tuple(f for f in factors if f > 1)


@dataclass(frozen=True)
class FinAbGroup:
    """Finite abelian group in invariant-factor normal form.

    Any list of cyclic orders is accepted and normalised, so
    ``FinAbGroup((2, 3))`` is the cyclic group of order 6 and
    ``FinAbGroup((4, 2))`` has factors ``(2, 4)``.
    """

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", _invariant_factors(self.invariant_factors))

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def rank(self) -> int:
        """Minimal number of generators."""
        return len(self.invariant_factors)

    @property
    def is_cyclic(self) -> bool:
        return self.rank <= 1

    @property
    def spec(self) -> str:
        if not self.invariant_factors:
            return "C1"
        return "x".join(f"C{n}" for n in self.invariant_factors)

    def __str__(self):
        return self.spec

    @cached_property
    def _radix(self) -> np.ndarray:
        # weight of each residue in the mixed-radix code; first factor most significant
        w = [1] * self.rank
        for i in range(self.rank - 2, -1, -1):
            w[i] = w[i + 1] * self.invariant_factors[i + 1]
        return np.array(w, dtype=np.int64)

    @property
    def zero(self) -> Character:
        return (0,) * self.rank

    def char(self, value) -> Character:
        """Coerce ``value`` (int for cyclic groups, or a sequence) to a reduced character."""
        if isinstance(value, (int, np.integer)):
            if self.rank > 1:
                raise ValueError(f"integer character {value} is ambiguous in {self.spec}")
            return (int(value) % self.invariant_factors[0],) if self.rank else ()
        value = tuple(int(v) for v in value)
        if len(value) != self.rank:
            raise ValueError(f"character {value} does not belong to the dual of {self.spec}")
        return tuple(v % n for v, n in zip(value, self.invariant_factors))

    def add(self, a: Character, b: Character) -> Character:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.invariant_factors))

    def sub(self, a: Character, b: Character) -> Character:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.invariant_factors))

    def neg(self, a: Character) -> Character:
        return tuple(-x % n for x, n in zip(a, self.invariant_factors))

    def scale(self, k: int, a: Character) -> Character:
        return tuple(k * x % n for x, n in zip(a, self.invariant_factors))

    def elements(self) -> list[Character]:
        """All characters, in lexicographic order."""
        return list(itertools.product(*(range(n) for n in self.invariant_factors)))

    def encode(self, a: Character) -> int:
        return int(sum(x * w for x, w in zip(a, self._radix)))

    def decode(self, code: int) -> Character:
        return tuple(int(code // w % n) for w, n in zip(self._radix, self.invariant_factors))

    def encode_array(self, residues: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`encode` over the last axis."""
        return residues @ self._radix if self.rank else np.zeros(residues.shape[:-1], dtype=np.int64)

    def decode_array(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        facs = np.array(self.invariant_factors, dtype=np.int64)
        return (codes[..., None] // self._radix) % facs

    def element_order(self, a: Character) -> int:
        return reduce(lambda x, y: x * y // gcd(x, y), (n // gcd(x, n) for x, n in zip(a, self.invariant_factors)), 1)

    def format_char(self, a: Character) -> str:
        if self.rank == 1:
            return str(a[0])
        return "(" + ",".join(map(str, a)) + ")"


def cyclic(N: int) -> FinAbGroup:
    """The cyclic group of order ``N``."""
    if N <= 0:
        raise ValueError(f"cyclic group order must be positive, got {N}")
    return FinAbGroup((N,))


def product(*groups: FinAbGroup) -> FinAbGroup:
    return FinAbGroup(tuple(n for g in groups for n in g.invariant_factors))


_SPEC_RE = re.compile(r"^c(\d+)$", re.IGNORECASE)


def parse_group(spec: str) -> FinAbGroup:
    """Parse ``"C<N>"`` or products like ``"C2xC4"`` (case-insensitive)."""
    parts = re.split(r"[xX×*]", spec.strip().replace(" ", ""))
    orders = []
    for part in parts:
        m = _SPEC_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse group spec {spec!r}")
        orders.append(int(m.group(1)))
    if not orders:
        raise ValueError(f"cannot parse group spec {spec!r}")
    return FinAbGroup(tuple(orders))


def _frattini_data(group: FinAbGroup):
    """For each prime p | |A|, the factor positions surviving in A/pA."""
    primes = sorted({p for n in group.invariant_factors for p in factorint(n)})
    return [(p, [i for i, n in enumerate(group.invariant_factors) if n % p == 0]) for p in primes]


def _rank_mod_p_small(rows, p):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        for i in range(len(rows)):
            if i != rank and rows[i][c] % p:
                f = rows[i][c] * inv
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def generates(chars, group: FinAbGroup) -> bool:
    """True iff ``chars`` generate the whole character group.

    Uses the criterion that a subgroup ``H`` equals ``A`` iff ``H + pA = A``
    for every prime ``p``, which reduces to a rank check over ``F_p``.
    """
    chars = [group.char(c) if not isinstance(c, tuple) else c for c in chars]
    for c in chars:
        if len(c) != group.rank or any(not 0 <= x < n for x, n in zip(c, group.invariant_factors)):
            raise ValueError(f"character {c} does not belong to the dual of {group.spec}")
    for p, pos in _frattini_data(group):
        rows = [[c[i] % p for i in pos] for c in chars]
        if len(rows) < len(pos) or _rank_mod_p_small(rows, p) < len(pos):
            return False
    return True


def automorphisms(group: FinAbGroup, limit: int = 5000) -> list[np.ndarray]:
    """All automorphisms of the character group as integer matrices acting on row vectors.

    Brute force over images of the standard generators; meant for small groups.
    """
    facs = group.invariant_factors
    elems = group.elements()
    if len(elems) ** group.rank > limit * 100:
        raise ValueError(f"{group.spec} is too large for brute-force automorphism enumeration")
    result = []
    for images in itertools.product(elems, repeat=group.rank):
        # e_i has order n_i; its image must satisfy n_i * image = 0
        if any(group.scale(n, im) != group.zero for n, im in zip(facs, images)):
            continue
        if not generates(list(images), group):
            continue
        result.append(np.array(images, dtype=np.int64).reshape(group.rank, group.rank))
        if len(result) > limit:
            raise ValueError("automorphism limit exceeded")
    return result


def apply_matrix(group: FinAbGroup, matrix: np.ndarray, a: Character) -> Character:
    """Image of a character under a homomorphism given by an integer matrix (row-vector convention)."""
    return group.char(np.asarray(a, dtype=np.int64) @ matrix) if group.rank else ()


@dataclass(frozen=True)
class DualSurjection:
    """Dual ``0 -> A'' -> A -> A' -> 0`` of a short exact sequence ``0 -> G' -> G -> G'' -> 0``.

    ``project`` sends characters of ``G`` to characters of the subgroup ``G'``
    (restriction); ``embed`` identifies characters of the quotient ``G''`` with
    the kernel ``A''`` of the restriction.
    """

    source: FinAbGroup
    target: FinAbGroup
    kernel: FinAbGroup
    project_matrix: np.ndarray = field(repr=False, compare=False)
    embed_matrix: np.ndarray = field(repr=False, compare=False)

    def project(self, a: Character) -> Character:
        return apply_matrix(self.target, self.project_matrix, a) if self.target.rank else ()

    def embed(self, b: Character) -> Character:
        if not self.kernel.rank:
            return self.source.zero
        return self.source.char(np.asarray(b, dtype=np.int64) @ self.embed_matrix)

    @cached_property
    def _fibres(self) -> dict[Character, list[Character]]:
        fib: dict[Character, list[Character]] = {}
        for a in self.source.elements():
            fib.setdefault(self.project(a), []).append(a)
        return fib

    @cached_property
    def _kernel_index(self) -> dict[Character, Character]:
        return {self.embed(b): b for b in self.kernel.elements()}

    def in_kernel(self, a: Character) -> bool:
        return a in self._kernel_index

    def unembed(self, a: Character) -> Character:
        """Inverse of :meth:`embed` on the kernel."""
        try:
            return self._kernel_index[a]
        except KeyError:
            raise ValueError(f"{a} is not in the kernel") from None

    def check(self) -> None:
        """Assert surjectivity, fibre sizes and exactness."""
        k = self.kernel.order
        if len(self._fibres) != self.target.order:
            raise AssertionError("projection is not surjective")
        if any(len(f) != k for f in self._fibres.values()):
            raise AssertionError("fibres have the wrong size")
        if len(self._kernel_index) != k:
            raise AssertionError("kernel embedding is not injective")
        if any(self.project(a) != self.target.zero for a in self._kernel_index):
            raise AssertionError("embedding followed by projection is nonzero")


def enumerate_lifts(s: DualSurjection, a: Character) -> list[Character]:
    """All characters of the source mapping to ``a`` in the target."""
    a = s.target.char(a) if not isinstance(a, tuple) else a
    return list(s._fibres[a])


def cyclic_sequence(N: int, d: int) -> DualSurjection:
    """Dual sequence for the subgroup ``C_d`` of ``C_N``.

    Restriction to ``C_d`` is reduction mod ``d``; characters of ``C_N / C_d``
    (cyclic of order ``N/d``) embed as multiples of ``d``.
    """
    if N % d:
        raise ValueError(f"{d} does not divide {N}")
    s = DualSurjection(
        source=cyclic(N),
        target=FinAbGroup((d,)),
        kernel=FinAbGroup((N // d,)),
        project_matrix=np.array([[1]], dtype=np.int64),
        embed_matrix=np.array([[d]], dtype=np.int64),
    )
    s.check()
    return s


def dual_sequence(group: FinAbGroup, subgroup_gens) -> DualSurjection:
    """Dual sequence for the subgroup of ``group`` generated by ``subgroup_gens``.

    Group elements and characters are both written in the invariant-factor
    coordinates; the pairing is ``<a, g> = sum a_i g_i / n_i`` mod 1.
    """
    from .linalg import smith_with_transforms

    facs = group.invariant_factors
    k = group.rank
    gens = [group.char(g) if not isinstance(g, tuple) else g for g in subgroup_gens]
    L = reduce(lambda x, y: x * y // gcd(x, y), facs, 1)
    # annihilator lattice: x with sum_i x_i g_i L/n_i = 0 mod L for every generator
    m = len(gens)
    big = [[(gens[j][i] * (L // facs[i])) if j < m else 0 for j in range(m)] for i in range(k)]
    stacked = [row for row in big] + [[L if j == jj else 0 for jj in range(m)] for j in range(m)]
    if m:
        U, D, _ = smith_with_transforms(stacked)
        rnk = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
        kernel_rows = [U[i][:k] for i in range(rnk, len(U))]
    else:
        kernel_rows = [[int(i == j) for j in range(k)] for i in range(k)]
    # basis of the annihilator lattice L'' (contains n_i e_i)
    kernel_rows = _row_basis(kernel_rows + [[facs[i] if i == j else 0 for j in range(k)] for i in range(k)], k)
    B = np.array(kernel_rows, dtype=object)
    Binv = _inverse_rational(B)
    C = [[int(v) for v in row] for row in (np.diag(np.array(facs, dtype=object)).dot(Binv))]
    U2, D2, V2 = smith_with_transforms(C)
    V2inv = _inverse_rational(np.array(V2, dtype=object))
    Bp = V2inv.dot(B)
    kept = [i for i in range(k) if abs(D2[i][i]) > 1]
    kernel = FinAbGroup(tuple(abs(D2[i][i]) for i in kept))
    embed = np.array([[int(x) for x in Bp[i]] for i in kept], dtype=np.int64).reshape(len(kept), k)
    # quotient A / A'': Z^k modulo diag(n) and the rows of B
    rel = [list(map(int, r)) for r in B] + [[facs[i] if i == j else 0 for j in range(k)] for i in range(k)]
    _, D3, V3 = smith_with_transforms(rel)
    kept3 = [i for i in range(k) if abs(D3[i][i]) != 1]
    target = FinAbGroup(tuple(abs(D3[i][i]) for i in kept3))
    project = np.array([[int(V3[r][c]) for c in kept3] for r in range(k)], dtype=np.int64).reshape(k, len(kept3))
    if kernel.invariant_factors != tuple(abs(D2[i][i]) for i in kept) or target.invariant_factors != tuple(
        abs(D3[i][i]) for i in kept3
    ):
        raise AssertionError("Smith form did not return invariant factors in normal order")
    s = DualSurjection(group, target, kernel, project, embed)
    s.check()
    return s


def _row_basis(rows, k):
    from .linalg import smith_with_transforms

    # Hermite-style basis via Smith form: rows of D V^{-1} restricted to the nonzero part
    U, D, V = smith_with_transforms(rows)
    Vinv = _inverse_rational(np.array(V, dtype=object))
    basis = []
    for i in range(min(len(D), k)):
        if D[i][i]:
            basis.append([int(D[i][i] * x) for x in Vinv[i]])
    if len(basis) != k:
        raise AssertionError("annihilator lattice is not of full rank")
    return basis


def _inverse_rational(M):
    import sympy

    inv = sympy.Matrix(M.tolist()).inv()
    return np.array(inv.tolist(), dtype=object)
