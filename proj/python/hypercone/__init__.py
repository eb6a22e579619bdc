"""Hyperbolic SL2 systems: multicones, dimension estimates, separation and cone contraction."""

import json as _json

from . import _hypercone as _core
from ._hypercone import (
    HyperconeError,
    IfsSystem,
    Multicone,
    attractor_sample,
    box_counting,
    cross_section_map,
    elliptic_word,
    family_scan,
    find_multicone,
    hilbert_metric,
    ifs_separation,
    lyapunov_random,
    mobius_act,
    project_act,
    project_derivative,
    solve_dn,
    zeta_critical_exponent,
)

__version__ = _core.__version__


def verify_strict_invariance(system, multicone):
    return _json.loads(_core.verify_strict_invariance(system, multicone))


def attractor_dimension(system, multicone, n, budget=None):
    return _json.loads(_core.attractor_dimension(system, multicone, n, budget))


def furstenberg_dimension(system, steps, seed, multicone=None, p=None):
    return _json.loads(_core.furstenberg_dimension(system, steps, seed, multicone, p))


def separation_profile(system, n, budget=None):
    return _json.loads(_core.separation_profile(system, n, budget))


def strict_invariance_cone(a, basis=None):
    return _json.loads(_core.strict_invariance_cone(a, basis))


__all__ = [
    "HyperconeError",
    "IfsSystem",
    "Multicone",
    "attractor_dimension",
    "attractor_sample",
    "box_counting",
    "cross_section_map",
    "elliptic_word",
    "family_scan",
    "find_multicone",
    "furstenberg_dimension",
    "hilbert_metric",
    "ifs_separation",
    "lyapunov_random",
    "mobius_act",
    "project_act",
    "project_derivative",
    "separation_profile",
    "solve_dn",
    "strict_invariance_cone",
    "verify_strict_invariance",
    "zeta_critical_exponent",
]
