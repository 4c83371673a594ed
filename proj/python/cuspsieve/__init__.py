"""Exact coefficients, congruences, and the vanishing-prime sieve for the
six level-one cusp forms of weight 12, 16, 18, 20, 22, 26."""

import json as _json

from ._core import (
    certify_json,
    classify,
    coefficient_from_primes,
    deg2,
    delta_coeffs,
    enumerate_candidates,
    is_prime,
    legendre_filters,
    primality,
    search_json,
    smallest_vanishing,
    theorem2_preconditions,
    theta_congruence_check,
    trig_residual,
    type2_residue,
    verify_tables,
    weights,
    zero_residues,
)

__all__ = [
    "certify",
    "certify_json",
    "classify",
    "coefficient_from_primes",
    "deg2",
    "delta_coeffs",
    "enumerate_candidates",
    "is_prime",
    "legendre_filters",
    "primality",
    "search",
    "search_json",
    "smallest_vanishing",
    "theorem2_preconditions",
    "theta_congruence_check",
    "trig_residual",
    "type2_residue",
    "verify_tables",
    "weights",
    "zero_residues",
]


def search(k, limit, **kwargs):
    """Run the sieve on [0, limit) and return the report as a dict."""
    return _json.loads(search_json(k, limit, **kwargs))


def certify(k, value):
    """Check value against every congruence and filter; returns a dict."""
    return _json.loads(certify_json(k, value))
