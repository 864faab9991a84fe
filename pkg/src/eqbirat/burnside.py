"""Finitely presented abelian groups of Burnside symbols.

Generators are opaque labelled symbols (stabilizer, residual action on a
function algebra, weights); relations are integer combinations of them.
Presets transcribe published presentations; :func:`burn2_cyclic_relations`
generates the points-and-rational-curves sector of ``Burn_2(C_N)`` from the
surface blow-up schemas.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .linalg import Cokernel

__all__ = [
    "BurnGenerator",
    "BurnPresentation",
    "BurnClass",
    "ProjectionError",
    "burn2_cyclic_relations",
    "preset_presentation",
    "presentation_names",
    "load_presentation",
    "evaluate_class",
    "class_verdict",
    "projection_functional",
    "to_symbol_group",
]

MAX_CYCLIC_N = 12


class ProjectionError(ValueError):
    """A proposed functional does not vanish on some relation."""


@dataclass(frozen=True)
class BurnGenerator:
    id: str
    stabilizer: str
    action: str
    weights: tuple = ()
    meta: tuple = ()

    def get(self, key, default=None):
        return dict(self.meta).get(key, default)


@dataclass
class BurnClass:
    """Known terms of a class plus named unknown terms (by stabilizer)."""

    terms: dict
    unknown: list = field(default_factory=list)


@dataclass
class BurnPresentation:
    group_name: str
    generators: list[BurnGenerator]
    relations: list[dict]
    notes: list[str] = field(default_factory=list)
    classes: dict = field(default_factory=dict)
    families: list[str] = field(default_factory=list)
    n: int = 2
    aliases: dict = field(default_factory=dict)

    def __post_init__(self):
        self._index = {g.id: i for i, g in enumerate(self.generators)}
        if len(self._index) != len(self.generators):
            raise ValueError("duplicate generator ids")
        for r in self.relations:
            for k in r:
                if not 0 <= k < len(self.generators):
                    raise ValueError(f"relation refers to unknown generator {k}")
        self._quotient = None

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def index(self, gid: str) -> int:
        try:
            return self._index[gid]
        except KeyError:
            raise KeyError(f"unknown generator {gid!r}") from None

    def vector(self, terms) -> dict:
        """``[(coeff, id), ...]`` or ``{id: coeff}`` to a sparse generator vector."""
        items = terms.items() if isinstance(terms, dict) else ((gid, c) for c, gid in terms)
        v: dict[int, int] = {}
        for gid, c in items:
            i = self.index(gid)
            v[i] = v.get(i, 0) + c
        return {i: c for i, c in v.items() if c}

    def format(self, v: dict) -> str:
        if not v:
            return "0"
        return " + ".join(f"{c}*{self.generators[i].id}" for i, c in sorted(v.items()))

    @property
    def quotient(self) -> Cokernel:
        if self._quotient is None:
            self._quotient = Cokernel(self.relations, ncols=self.ngens)
        return self._quotient

    def is_zero(self, v: dict) -> bool:
        return self.quotient.is_zero(v)

    def order(self, v: dict):
        return self.quotient.order(v)

    def equal(self, u: dict, v: dict) -> bool:
        d = dict(u)
        for k, c in v.items():
            d[k] = d.get(k, 0) - c
        return self.is_zero({k: c for k, c in d.items() if c})

    def add_relations(self, rows) -> "BurnPresentation":
        return BurnPresentation(
            self.group_name, self.generators, self.relations + list(rows), self.notes, self.classes, self.families, self.n, self.aliases
        )

    def subgroup(self, label: str) -> str:
        """Resolve a subgroup alias such as ``center`` to its stabilizer label."""
        return self.aliases.get(label, label)

    def to_json(self) -> dict:
        return {
            "format": 1,
            "group": self.group_name,
            "n": self.n,
            "generators": [
                {"id": g.id, "stabilizer": g.stabilizer, "action": g.action, "weights": list(g.weights), **dict(g.meta)}
                for g in self.generators
            ],
            "relations": [{"lhs": [], "rhs": [[-c, self.generators[i].id] for i, c in sorted(r.items())]} for r in self.relations],
        }


# --------------------------------------------------------------- file format

_RESERVED = {"id", "stabilizer", "action", "weights"}


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(y) for y in x)
    return x


def _from_json(d: dict, name: str = "") -> BurnPresentation:
    if d.get("format", 1) != 1:
        raise ValueError("presentation must declare \"format\": 1")
    gens = [
        BurnGenerator(
            g["id"],
            str(g["stabilizer"]),
            str(g["action"]),
            _freeze(g.get("weights", [])),
            tuple(sorted((k, _freeze(v)) for k, v in g.items() if k not in _RESERVED)),
        )
        for g in d["generators"]
    ]
    idx = {g.id: i for i, g in enumerate(gens)}
    rows, notes = [], []
    for r in d["relations"]:
        row: dict[int, int] = {}
        for sign, side in ((1, r.get("lhs", [])), (-1, r.get("rhs", []))):
            for c, gid in side:
                if gid not in idx:
                    raise KeyError(f"relation refers to unknown generator {gid!r}")
                row[idx[gid]] = row.get(idx[gid], 0) + sign * c
        rows.append({k: c for k, c in row.items() if c})
        notes.append(r.get("note", ""))
    p = BurnPresentation(d.get("group", name), gens, rows, notes, families=list(d.get("families", [])), n=int(d.get("n", 2)), aliases=dict(d.get("aliases", {})))
    for cname, c in d.get("classes", {}).items():
        p.classes[cname] = BurnClass(p.vector(c["terms"]), list(c.get("unknown", [])))
    return p


def _catalog() -> dict:
    with resources.files(__package__).joinpath("data/burn_presets.json").open() as fh:
        return json.load(fh)["presentations"]


def presentation_names() -> list[str]:
    return sorted(_catalog()) + [f"burn2-cyclic-C{N}" for N in (2, 3, 4)]


def preset_presentation(name: str) -> BurnPresentation:
    """Stored presentation (``burn2-C4``, ``burn2-C2xC2``, ``burn2-D6``) or ``burn2-cyclic-C<N>``."""
    key = name.replace(" ", "")
    if key.lower().startswith("burn2-cyclic-c"):
        return burn2_cyclic_relations(int(key[len("burn2-cyclic-c"):]))
    cat = _catalog()
    for k in cat:
        if k.lower() == key.lower():
            return _from_json(cat[k], k)
    raise KeyError(f"unknown presentation {name!r}; available: {', '.join(presentation_names())}")


def load_presentation(spec: str) -> BurnPresentation:
    """Preset name or path to a format-1 JSON presentation file."""
    try:
        return preset_presentation(spec)
    except (KeyError, ValueError):
        pass
    try:
        with open(spec) as fh:
            return _from_json(json.load(fh), spec)
    except FileNotFoundError:
        raise KeyError(f"{spec!r} is neither a preset ({', '.join(presentation_names())}) nor a file") from None


# ------------------------------------------------------- cyclic generation


def _point_id(N, D, a1, a2):
    a1, a2 = sorted((a1 % D, a2 % D))
    orbit = "k" if N == D else f"k^{N // D}"
    return f"(C{D},{orbit},({a1},{a2}))"


def _curve_label(ell, e, u):
    base = "k(t)" if ell == 1 else f"k^{ell}(t)"
    if e == 1:
        return base
    u %= e
    return f"{base}:zeta{e}^{min(u, e - u)}"


def _curve_id(d, ell, e, u, a):
    return f"(C{d},{_curve_label(ell, e, u)},({a % d}))"


def burn2_cyclic_relations(N: int) -> BurnPresentation:
    """Points-and-rational-curves sector of ``Burn_2^nontriv(C_N)``.

    Generators:

    * points ``(C_D, k^{N/D}, (a1, a2))`` for ``D | N``, ``D > 1``, with
      ``a1, a2`` nonzero and generating ``Z/D``;
    * rational curves ``(C_d, k^l(t)[:zeta_e^u], (a))`` for ``d | N``, ``d > 1``,
      ``l e = N/d``, ``u`` a unit mod ``e`` (up to sign), ``a`` a unit mod ``d``.

    Relations: blowing up each point orbit, and blowing up a general point
    orbit on each curve (whose new point ``(a, -a)`` therefore vanishes).
    """
    if not 1 <= N <= MAX_CYCLIC_N:
        raise ValueError(f"N must be between 1 and {MAX_CYCLIC_N}")
    gens: list[BurnGenerator] = []
    divisors = [D for D in range(2, N + 1) if N % D == 0]
    for D in divisors:
        for a1 in range(1, D):
            for a2 in range(a1, D):
                if math.gcd(math.gcd(a1, a2), D) == 1:
                    meta = (("kind", "point"), ("orbit", N // D))
                    gens.append(BurnGenerator(_point_id(N, D, a1, a2), f"C{D}", "k" if D == N else f"k^{N // D}", (a1, a2), meta))
    for d in divisors:
        for e in range(1, N // d + 1):
            if (N // d) % e:
                continue
            ell = N // d // e
            units_e = sorted({min(u, e - u) for u in range(1, e) if math.gcd(u, e) == 1}) if e > 1 else [0]
            for u in units_e:
                for a in range(1, d):
                    if math.gcd(a, d) == 1:
                        meta = (("kind", "curve"), ("curve", "P1"), ("orbit", ell), ("residual_order", e))
                        gens.append(BurnGenerator(_curve_id(d, ell, e, u, a), f"C{d}", _curve_label(ell, e, u), (a,), meta))
    idx = {g.id: i for i, g in enumerate(gens)}
    rows, notes = [], []
    seen = set()

    def emit(row, note):
        row = {k: c for k, c in row.items() if c}
        key = tuple(sorted(row.items()))
        if row and key not in seen:
            seen.add(key)
            rows.append(row)
            notes.append(note)

    for g in gens:
        if dict(g.meta)["kind"] != "point":
            continue
        D = int(g.stabilizer[1:])
        a1, a2 = g.weights
        row = {idx[g.id]: 1}
        if a1 == a2:
            cid = _curve_id(D, N // D, 1, 0, a1)
            row[idx[cid]] = row.get(idx[cid], 0) - 1
        else:
            c = (a1 - a2) % D
            dd = math.gcd(c, D)
            if dd > 1:
                e = D // dd
                cid = _curve_id(dd, N // D, e, c // dd, a1)
                row[idx[cid]] = row.get(idx[cid], 0) - 1
            for p in (_point_id(N, D, a1, a2 - a1), _point_id(N, D, a2, a1 - a2)):
                row[idx[p]] = row.get(idx[p], 0) - 1
        emit(row, f"blow up {g.id}")
    for d in divisors:
        for a in range(1, d):
            if math.gcd(a, d) == 1:
                pid = _point_id(N, d, a, -a)
                emit({idx[pid]: 1}, f"blow up a general orbit on a C{d}-curve with weight {a}")
    return BurnPresentation(f"C{N}", gens, rows, notes)


def to_symbol_group(p: BurnPresentation, basis) -> dict[int, dict]:
    """Map generators of a cyclic presentation to ``S_2(C_N)``: full-stabilizer points and curves.

    Returns ``{generator index: symbol vector}``; generators with a proper
    stabilizer map to zero and are omitted.
    """
    N = basis.group.order
    out = {}
    for i, g in enumerate(p.generators):
        if g.stabilizer != f"C{N}":
            continue
        kind = g.get("kind")
        if kind == "point":
            out[i] = {basis.index([(g.weights[0],), (g.weights[1],)]): 1}
        elif kind == "curve":
            out[i] = {basis.index([(g.weights[0],), (0,)]): 1}
    return out


# ------------------------------------------------------------ class values


def evaluate_class(p: BurnPresentation, components) -> dict:
    """Generator-coordinate vector of ``sum m * generator`` (ids or indices)."""
    v: dict[int, int] = {}
    for gen, mult in components:
        i = gen if isinstance(gen, int) else p.index(gen)
        if not 0 <= i < p.ngens:
            raise KeyError(f"unknown generator {gen!r}")
        v[i] = v.get(i, 0) + mult
    return {i: c for i, c in v.items() if c}


def class_verdict(p: BurnPresentation, c: BurnClass) -> str:
    """``"zero"``, ``"nonzero"`` or ``"undetermined"`` for a class with unknown terms.

    Unknown terms are only known by stabilizer.  The known part is tested in
    the further quotient where every generator with one of those stabilizers
    is set to zero; a nonzero image there proves the class is nonzero.
    """
    if not c.unknown:
        return "zero" if p.is_zero(c.terms) else "nonzero"
    hidden = {p.subgroup(u.get("stabilizer", "")) for u in c.unknown}
    kill = [{i: 1} for i, g in enumerate(p.generators) if g.stabilizer in hidden]
    q = p.add_relations(kill)
    return "undetermined" if q.is_zero(c.terms) else "nonzero"


@dataclass
class Projection:
    """Linear map from generator coordinates to a free group on pair classes."""

    presentation: BurnPresentation
    stabilizer: str
    images: dict  # generator index -> pair key

    def __call__(self, v) -> dict:
        if isinstance(v, BurnClass):
            for u in v.unknown:
                if self.presentation.subgroup(u.get("stabilizer", "")) == self.stabilizer:
                    raise ValueError(f"unknown term {u} has stabilizer {self.stabilizer}; value undetermined")
            v = v.terms
        out: dict = {}
        for i, c in v.items():
            key = self.images.get(i)
            if key is not None:
                out[key] = out.get(key, 0) + c
        return {k: c for k, c in out.items() if c}


def projection_functional(p: BurnPresentation, H: str, *, noncyclic_only: bool = False, target_Y_label: str | None = None) -> Projection:
    """Projection onto pair classes ``[(H', a)]`` for curves with stabilizer ``H``.

    A generator with stabilizer ``H`` whose curve label is ``target_Y_label``
    (when given), and whose residual group ``H'/H`` is noncyclic when
    ``noncyclic_only``, maps to the basis vector of ``(residual, weights)``.
    Raises :class:`ProjectionError` if some relation has nonzero image.
    """
    H = p.subgroup(H)
    images = {}
    for i, g in enumerate(p.generators):
        if g.stabilizer != H or g.get("curve") is None:
            continue
        if target_Y_label is not None and g.get("curve") != target_Y_label:
            continue
        if noncyclic_only and g.get("residual_cyclic", True):
            continue
        images[i] = (g.get("residual", "?"), g.weights)
    proj = Projection(p, H, images)
    for k, row in enumerate(p.relations):
        if proj(row):
            raise ProjectionError(f"relation {k} ({p.format(row)}) has nonzero image {proj(row)}")
    return proj
