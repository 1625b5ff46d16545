"""Steenrod operations in the Milnor basis acting on
E(x_1..x_n) tensor F_p[y_1..y_n] for odd primes, with the bracket
determinants and Dickson invariants of the rank-n system and a harness
that verifies the known closed-form action tables against the engine.
"""

from .field import binom_mod_p, centered, inverse_mod, is_odd_prime, primitive_root, validate_odd_prime
from .poly import (
    LinearMap,
    Monomial,
    ParseError,
    Polynomial,
    format_poly,
    mono_mul,
    mono_one,
    parse,
    x_var,
    y_var,
)
from .milnor import (
    MilnorAction,
    MilnorOp,
    act,
    cartan_product,
    delta_op,
    engine_for,
    op_from_text,
    op_text,
    power_op,
    splits,
    st_ij,
    unshuffle_sign,
)
from .invariants import (
    NotDivisibleError,
    bracket,
    check_invariance,
    dickson,
    dickson_decompose,
    exact_div,
    gl_generators,
    l_poly,
    sl_generators,
)
from .oracles import (
    CASE_FAMILIES,
    TheoremCase,
    VerificationReport,
    case_operation,
    case_target,
    default_cases,
    oracle_value,
    recursion_value,
    reports_to_json,
    verify_case,
    verify_suite,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
