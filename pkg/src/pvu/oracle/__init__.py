"""Exact-arithmetic reference model and the differential harness built on it."""

from pvu.oracle.exact import exact_dot, exact_op, posit_value, round_to_posit

__all__ = ["exact_dot", "exact_op", "posit_value", "round_to_posit"]
