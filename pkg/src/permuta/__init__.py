"""Permutability graphs of subgroups of finite groups and their embeddings in low-genus surfaces."""

from .classifier import cross_validate, oracle_classify, recognize
from .graphs import permutability_graph
from .groups import FiniteGroup, all_subgroups, load_group
from .topology import classify_surface, embeddable_on, verify_certificate
from .zoo import construct, parse_descriptor

__all__ = [
    "FiniteGroup", "all_subgroups", "load_group", "construct", "parse_descriptor",
    "permutability_graph", "classify_surface", "embeddable_on", "verify_certificate",
    "cross_validate", "oracle_classify", "recognize",
]
