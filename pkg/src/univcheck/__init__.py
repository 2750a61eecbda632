"""Decide completeness and universality of finite quantum gate sets.

A gate set is complete when the closed group it generates is dense in the
unitary group up to phases; this is read off from the dimension ``M_2k`` of
the invariants of ``g^{⊗k} ⊗ conj(g)^{⊗k}``.  Universality reduces to
completeness of the gates placed on ``N`` qudits together with the wire
permutations.
"""
from univcheck.decision import (
    CompletenessVerdict,
    UniversalityVerdict,
    check_complete,
    check_N_universal,
    check_universal,
    regularity_bound,
)
from univcheck.gateset import GateSet, UnitaryGate, builtin_gate, gateset_from_names, parse_gateset
from univcheck.invariants import InvariantReport, finite_group_m2k, fixed_space_dim, gl_baseline, haar_oracle, m2k

__version__ = "0.1.0"

__all__ = [
    "CompletenessVerdict",
    "GateSet",
    "InvariantReport",
    "UniversalityVerdict",
    "UnitaryGate",
    "builtin_gate",
    "check_N_universal",
    "check_complete",
    "check_universal",
    "finite_group_m2k",
    "fixed_space_dim",
    "gateset_from_names",
    "gl_baseline",
    "haar_oracle",
    "m2k",
    "parse_gateset",
    "regularity_bound",
]
