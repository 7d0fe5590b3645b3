"""Finite concrete categories: PIE-limits, concreteness predicates and relational signatures."""

from .core import (
    BudgetExceeded,
    FinCategory,
    Functor,
    NatTrans,
    Verdict,
    build_category,
    compose_functors,
    validate_category,
    validate_functor,
    validate_nat,
)
from .concrete import ConcreteCategory, FinSetFunctor, concrete_from_functions
from .dsl import Workspace, parse, print_workspace
from .limits import equifier, inserter, product, pseudopullback, pullback
from .signatures import RelationSymbol, Signature, classify_aec, enumerate_sigma

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "ConcreteCategory",
    "FinCategory",
    "FinSetFunctor",
    "Functor",
    "NatTrans",
    "RelationSymbol",
    "Signature",
    "Verdict",
    "Workspace",
    "build_category",
    "classify_aec",
    "compose_functors",
    "concrete_from_functions",
    "enumerate_sigma",
    "equifier",
    "inserter",
    "parse",
    "print_workspace",
    "product",
    "pseudopullback",
    "pullback",
    "validate_category",
    "validate_functor",
    "validate_nat",
]
