"""Privacy-preserving vehicular announcement aggregation.

Keys and packets are passed around as their wire encodings (bytes).
"""

from ._vanetagg import (
    Error,
    Keys,
    Session,
    anonymity_prob,
    anonymity_prob_exact,
    format_scenario,
    gf_add,
    gf_interpolate_eval,
    gf_inv,
    gf_mul,
    initiate,
    reply,
    run_scenario,
    sign_verify,
    sweep,
    verify_announcement,
)

__all__ = [
    "Error",
    "Keys",
    "Session",
    "anonymity_prob",
    "anonymity_prob_exact",
    "format_scenario",
    "gf_add",
    "gf_interpolate_eval",
    "gf_inv",
    "gf_mul",
    "initiate",
    "reply",
    "run_scenario",
    "sign_verify",
    "sweep",
    "verify_announcement",
]
