"""Membership and separating finite quotients for subgroups of Z^n and F_n."""

from .benois import ProductAutomaton, benois_product_member, product_automaton
from .lattice import (
    Lattice,
    hnf,
    image_mod,
    lattice_hnf,
    lattice_member,
    lattice_separating_quotient,
    verify_lattice_quotient,
)
from .quotient import FiniteQuotient, QuotientExhausted, free_separating_quotient, separates
from .stallings import StallingsGraph, stallings_graph, subgroup_member

__all__ = [
    "FiniteQuotient",
    "Lattice",
    "ProductAutomaton",
    "QuotientExhausted",
    "StallingsGraph",
    "benois_product_member",
    "free_separating_quotient",
    "hnf",
    "image_mod",
    "lattice_hnf",
    "lattice_member",
    "lattice_separating_quotient",
    "product_automaton",
    "separates",
    "stallings_graph",
    "subgroup_member",
    "verify_lattice_quotient",
]
