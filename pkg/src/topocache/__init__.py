"""Coded caching for shared-cache broadcast networks.

Exact (rational) allocation, placement, clique-XOR delivery, converse bounds
and mismatch analysis for users sharing a small number of caches.
"""
from .bounds import (
    lower_bound_general,
    lower_bound_regular,
    optimality_certificate,
    tau_star,
    tilde_coefficient,
    coefficient,
)
from .delivery import Demand, decode, deliver, delivery_time, schedule, schedule_fractional
from .errors import (
    DecodeError,
    InvalidArgumentError,
    ResourceLimitError,
    TopoCacheError,
    UndefinedDoFError,
)
from .mismatch import MismatchScenario, converse_mismatch, delivery_time_mismatch, leaders
from .model import Topology, allocate, dof, format_rational, parse_rational, split_budget
from .placement import Library, build_placement, subpacketize
from .symfunc import elem_sym

__version__ = "0.1.0"

__all__ = [
    "Demand",
    "DecodeError",
    "InvalidArgumentError",
    "Library",
    "MismatchScenario",
    "ResourceLimitError",
    "TopoCacheError",
    "Topology",
    "UndefinedDoFError",
    "allocate",
    "build_placement",
    "coefficient",
    "converse_mismatch",
    "decode",
    "deliver",
    "delivery_time",
    "delivery_time_mismatch",
    "dof",
    "elem_sym",
    "format_rational",
    "leaders",
    "lower_bound_general",
    "lower_bound_regular",
    "optimality_certificate",
    "parse_rational",
    "schedule",
    "schedule_fractional",
    "split_budget",
    "subpacketize",
    "tau_star",
    "tilde_coefficient",
]
