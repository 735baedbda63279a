"""Unitriangular symplectic groups over small finite fields.

Exact-arithmetic library and CLI: root combinatorics of type C_n, the group
Up(2n, F_q) of upper unitriangular symplectic matrices, its standard
commutator-preserving maps, the constructive classification of arbitrary
commutator-preserving bijections into standard factors, and a verification
harness that replays each supporting fact at desk scale.
"""

from .classify import MapOracle, as_oracle, classify
from .errors import UpkitError
from .field import Field, FieldElem, field_new
from .group import Group, group
from .harness import catalog, run_all, run_lemma
from .pcmaps import composition_from_json, is_pc_map, map_from_json
from .roots import RootSystem, root_system

__all__ = [
    "Field",
    "FieldElem",
    "Group",
    "MapOracle",
    "RootSystem",
    "UpkitError",
    "as_oracle",
    "catalog",
    "classify",
    "composition_from_json",
    "field_new",
    "group",
    "is_pc_map",
    "map_from_json",
    "root_system",
    "run_all",
    "run_lemma",
]

__version__ = "0.1.0"
