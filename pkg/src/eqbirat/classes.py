"""Invariant classes of group actions from fixed-point data.

An action is described by the components of its fixed locus: tangent weights
normal to the component, its dimension, and (for the refined invariant) an
opaque birational label plus the integer ``m``.  Diagonal actions on
projective space and on semi-invariant hypersurfaces get their weights
computed automatically at coordinate points.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .groups import Character, FinAbGroup, cyclic, generates, parse_group
from .symbols import SymbolBasis, enumerate_symbols

__all__ = [
    "FixedComponent",
    "ActionDescription",
    "DiagonalHypersurface",
    "NotOnHypersurface",
    "DegenerateFixedPoint",
    "InadmissibleSymbol",
    "beta",
    "beta_k",
    "hypersurface_fixed_weights",
    "linear_pn_class",
    "preset",
    "preset_names",
    "load_input",
    "as_action",
]


class NotOnHypersurface(ValueError):
    pass


class DegenerateFixedPoint(ValueError):
    """Coordinate point is singular on the hypersurface or not an isolated fixed point."""


class InadmissibleSymbol(ValueError):
    pass


@dataclass(frozen=True)
class FixedComponent:
    weights: tuple[Character, ...]
    fixed_dim: int = 0
    label: str | None = None
    m: int | None = None
    multiplicity: int = 1

    def symbol(self, group: FinAbGroup) -> tuple[Character, ...]:
        return tuple(self.weights) + (group.zero,) * self.fixed_dim


@dataclass
class ActionDescription:
    group: FinAbGroup
    n: int
    components: list[FixedComponent] = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        for c in self.components:
            if len(c.weights) + c.fixed_dim != self.n:
                raise ValueError(f"component {c} has {len(c.weights)} weights and dimension {c.fixed_dim}, expected n={self.n}")
            if any(w == self.group.zero for w in c.weights):
                raise ValueError(f"component {c} has a zero tangent weight")

    def negated(self) -> "ActionDescription":
        g = self.group
        comps = [
            FixedComponent(tuple(g.neg(w) for w in c.weights), c.fixed_dim, c.label, c.m, c.multiplicity)
            for c in self.components
        ]
        return ActionDescription(g, self.n, comps, self.name)


def _component_from_json(group: FinAbGroup, d: dict) -> FixedComponent:
    return FixedComponent(
        tuple(group.char(w) for w in d["weights"]),
        int(d.get("fixed_dim", 0)),
        d.get("label"),
        d.get("m"),
        int(d.get("multiplicity", 1)),
    )


def _add(v: dict, k, c):
    x = v.get(k, 0) + c
    if x:
        v[k] = x
    else:
        v.pop(k, None)


def beta(action: ActionDescription, basis: SymbolBasis | None = None) -> tuple[SymbolBasis, dict]:
    """Sum over fixed components of the symbol of their weights padded by zeros."""
    g = action.group
    if basis is None:
        basis = enumerate_symbols(g, action.n)
    v: dict[int, int] = {}
    for c in action.components:
        sym = c.symbol(g)
        if not generates(list(sym), g):
            raise InadmissibleSymbol(f"weights {sym} of component do not generate the character group of {g.spec}")
        _add(v, basis.index(sym), c.multiplicity)
    return basis, v


def beta_k(action: ActionDescription) -> dict[tuple[str, int], tuple[SymbolBasis, dict]]:
    """Refined invariant: one vector in ``S_{m+1}(G)`` per (label, m) summand.

    Isolated points go to the summand ``("point", n - 1)``.
    """
    g = action.group
    out: dict[tuple[str, int], tuple[SymbolBasis, dict]] = {}
    bases: dict[int, SymbolBasis] = {}
    for c in action.components:
        if c.fixed_dim == 0:
            label, m = c.label or "point", c.m if c.m is not None else action.n - 1
        else:
            if c.label is None or c.m is None:
                raise ValueError(f"component of dimension {c.fixed_dim} needs a label and m")
            label, m = c.label, c.m
        pad = m + 1 - action.n + c.fixed_dim
        if pad < 0 or pad > c.fixed_dim:
            raise ValueError(f"m={m} is incompatible with a component of dimension {c.fixed_dim}")
        sym = tuple(c.weights) + (g.zero,) * pad
        if not generates(list(sym), g):
            raise InadmissibleSymbol(f"weights {sym} do not generate the character group of {g.spec}")
        if m + 1 not in bases:
            bases[m + 1] = enumerate_symbols(g, m + 1)
        basis = bases[m + 1]
        _, v = out.setdefault((label, m), (basis, {}))
        _add(v, basis.index(sym), c.multiplicity)
    return out


@dataclass
class DiagonalHypersurface:
    """Hypersurface ``sum c_k x^{e_k} = 0`` in ``P^N`` under a diagonal cyclic action.

    ``negate`` applies the automorphism ``a -> -a`` to every computed weight
    (and to the declared components), i.e. uses the opposite generator.
    """

    group: FinAbGroup
    ambient_weights: tuple[int, ...]
    degree: int
    monomials: tuple[tuple[int, ...], ...]
    negate: bool = False
    components: list[FixedComponent] = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        if not self.group.is_cyclic:
            raise ValueError("diagonal hypersurfaces are supported for cyclic groups")
        N = self.group.order
        self.ambient_weights = tuple(int(w) % N for w in self.ambient_weights)
        self.monomials = tuple(tuple(int(e) for e in m) for m in self.monomials)
        for m in self.monomials:
            if len(m) != len(self.ambient_weights) or sum(m) != self.degree:
                raise ValueError(f"monomial {m} does not have degree {self.degree} in {len(self.ambient_weights)} variables")
        chars = {self._weight(m) for m in self.monomials}
        if len(chars) != 1:
            raise ValueError(f"polynomial is not semi-invariant: monomial weights {sorted(chars)}")

    def _weight(self, m) -> int:
        return sum(e * w for e, w in zip(m, self.ambient_weights)) % self.group.order

    @property
    def chi(self) -> int:
        return self._weight(self.monomials[0])

    @property
    def dim(self) -> int:
        return len(self.ambient_weights) - 2

    def to_action(self) -> ActionDescription:
        """Isolated coordinate fixed points on the hypersurface plus declared components."""
        g = self.group
        counts = Counter(self.ambient_weights)
        comps = []
        for i, w in enumerate(self.ambient_weights):
            if counts[w] > 1:
                continue
            try:
                ws = hypersurface_fixed_weights(self, i)
            except NotOnHypersurface:
                continue
            comps.append(FixedComponent(tuple(g.char(x) for x in ws), 0))
        for c in self.components:
            ws = tuple(g.neg(x) for x in c.weights) if self.negate else c.weights
            comps.append(FixedComponent(ws, c.fixed_dim, c.label, c.m, c.multiplicity))
        return ActionDescription(g, self.dim, comps, self.name)


def hypersurface_fixed_weights(h: DiagonalHypersurface, i: int) -> list[int]:
    """Tangent weights of the hypersurface at the coordinate point ``e_i``.

    The ambient weights ``w_j - w_i`` (``j != i``) minus one copy of the
    weight ``chi - d w_i`` of the normal direction, carried by the variables
    ``x_j`` with ``x_i^{d-1} x_j`` in the equation.
    """
    N = h.group.order
    d = h.degree
    nvar = len(h.ambient_weights)
    if not 0 <= i < nvar:
        raise IndexError(i)
    pure = tuple(d if k == i else 0 for k in range(nvar))
    if pure in h.monomials:
        raise NotOnHypersurface(f"x_{i}^{d} occurs, so e_{i} is not on the hypersurface")
    linear = [j for j in range(nvar) if j != i and tuple((d - 1) if k == i else int(k == j) for k in range(nvar)) in h.monomials]
    if not linear:
        raise DegenerateFixedPoint(f"no monomial x_{i}^{d - 1} x_j: e_{i} is a singular point")
    wi = h.ambient_weights[i]
    tangent = [(h.ambient_weights[j] - wi) % N for j in range(nvar) if j != i]
    normal = (h.chi - d * wi) % N
    if any((h.ambient_weights[j] - wi) % N != normal for j in linear):
        raise AssertionError("linear terms at e_i do not carry the normal weight")
    tangent.remove(normal)
    if 0 in tangent:
        raise DegenerateFixedPoint(f"e_{i} is not an isolated fixed point (zero tangent weight)")
    if h.negate:
        tangent = [-x % N for x in tangent]
    return tangent


def linear_pn_class(N: int, weights) -> ActionDescription:
    """Fixed-locus description of the diagonal action of ``C_N`` on ``P^n`` with the given weights."""
    g = cyclic(N)
    weights = [int(w) % N for w in weights]
    n = len(weights) - 1
    if n < 1:
        raise ValueError("need at least two weights")
    if not generates([(w - weights[0]) % N for w in weights], g):
        raise ValueError(f"weights {weights} do not give a generically free action of C_{N}")
    comps = []
    for w, k in sorted(Counter(weights).items()):
        tang = tuple(g.char(x - w) for x in weights if x != w)
        comps.append(FixedComponent(tang, k - 1, None if k == 1 else f"P{k - 1}", None if k == 1 else n - 1))
    return ActionDescription(g, n, comps, f"P{n}-C{N}{tuple(weights)}")


# ------------------------------------------------------------------- presets


def _catalog() -> dict:
    with resources.files(__package__).joinpath("data/actions.json").open() as fh:
        return json.load(fh)


def preset_names() -> list[str]:
    cat = _catalog()
    return sorted(list(cat["actions"]) + list(cat["linear"]) + list(cat["hypersurfaces"]))


def _action_from_json(d: dict, name: str = "") -> ActionDescription:
    g = parse_group(d["group"])
    comps = [_component_from_json(g, c) for c in d.get("components", [])]
    return ActionDescription(g, int(d["n"]), comps, d.get("name", name))


def _hypersurface_from_json(d: dict, name: str = "") -> DiagonalHypersurface:
    g = parse_group(d["group"])
    comps = [_component_from_json(g, c) for c in d.get("components", [])]
    return DiagonalHypersurface(
        g, tuple(d["ambient_weights"]), int(d["degree"]), tuple(map(tuple, d["monomials"])), bool(d.get("negate", False)), comps, d.get("name", name)
    )


def preset(name: str):
    """A stored action (:class:`ActionDescription`) or hypersurface (:class:`DiagonalHypersurface`)."""
    cat = _catalog()
    if name in cat["actions"]:
        return _action_from_json(cat["actions"][name], name)
    if name in cat["linear"]:
        d = cat["linear"][name]
        a = linear_pn_class(d["N"], d["weights"])
        a.name = name
        return a
    if name in cat["hypersurfaces"]:
        return _hypersurface_from_json(cat["hypersurfaces"][name], name)
    raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")


def load_input(spec: str):
    """Preset name or path to a format-1 JSON file (action or hypersurface)."""
    try:
        return preset(spec)
    except KeyError:
        pass
    try:
        with open(spec) as fh:
            d = json.load(fh)
    except FileNotFoundError:
        raise KeyError(f"{spec!r} is neither a preset ({', '.join(preset_names())}) nor a file") from None
    if d.get("format") != 1:
        raise ValueError("input file must declare \"format\": 1")
    if "ambient_weights" in d:
        return _hypersurface_from_json(d, spec)
    return _action_from_json(d, spec)


def as_action(obj) -> ActionDescription:
    return obj.to_action() if isinstance(obj, DiagonalHypersurface) else obj
