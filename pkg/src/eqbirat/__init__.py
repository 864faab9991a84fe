"""Equivariant birational types: symbol groups B_n(G), their refinements, and Burnside presentations."""

__version__ = "0.1.0"

from .groups import FinAbGroup, cyclic, generates, parse_group, product  # noqa: E402
from .symbols import SymbolBasis, enumerate_symbols, relations  # noqa: E402
from .linalg import Cokernel, rank_mod_p, rank_rational, in_row_space, smith_normal_form, element_order  # noqa: E402
from .classes import beta, beta_k, preset  # noqa: E402
from .burnside import preset_presentation, burn2_cyclic_relations  # noqa: E402

__all__ = [
    "FinAbGroup",
    "cyclic",
    "product",
    "parse_group",
    "generates",
    "SymbolBasis",
    "enumerate_symbols",
    "relations",
    "Cokernel",
    "rank_mod_p",
    "rank_rational",
    "in_row_space",
    "smith_normal_form",
    "element_order",
    "beta",
    "beta_k",
    "preset",
    "preset_presentation",
    "burn2_cyclic_relations",
]
