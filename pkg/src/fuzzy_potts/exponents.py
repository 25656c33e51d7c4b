"""Closed-form SLE parameters and arm exponents for the colored model.

For cluster weight q in [1, 4) the interface parameters are
kappa' = 4*pi / arccos(-sqrt(q)/2) in (4, 6] and kappa = 16/kappa' in
[8/3, 4).  Bulk and even halfplane exponents depend only on the interface
count of the color sequence; odd halfplane exponents also depend on the
coloring parameter r through an arctangent whose branch is fixed by the
requirement rho_B in (-2, kappa - 4).  At kappa = 3 the arctangent
argument reduces to r / (1 - r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arms import HALFPLANE_MODE, PLANE_MODE, interface_count
from .coloring import BLUE, RED


class BranchError(RuntimeError):
    """The arctangent branch left its admissible interval."""


def kappa_of(q):
    """(kappa', kappa) for cluster weight q in (0, 4]."""
    if not 0 < q <= 4:
        raise ValueError("cluster weight must lie in (0, 4]")
    kappa_prime = 4.0 * math.pi / math.acos(-math.sqrt(q) / 2.0)
    return kappa_prime, 16.0 / kappa_prime


def _branch_angle(kappa, r):
    """Angle in (0, pi) whose tangent is sin(pi*k/2)/(1+cos(pi*k/2)-1/r)."""
    if not 0.0 < r < 1.0:
        raise ValueError("coloring parameter r must lie in (0, 1)")
    s = math.sin(math.pi * kappa / 2.0)
    c = 1.0 + math.cos(math.pi * kappa / 2.0) - 1.0 / r
    theta = math.atan2(s, c)
    if theta <= 0.0:
        theta += math.pi
    if not 0.0 < theta < math.pi:
        raise BranchError(f"branch angle {theta} outside (0, pi)")
    return theta


@dataclass(frozen=True)
class ModelParams:
    """Model point (q, r) with the derived interface parameters."""

    q: float
    r: float
    kappa_prime: float = None
    kappa: float = None

    def __post_init__(self):
        if not 1 <= self.q < 4:
            raise ValueError("cluster weight q must lie in [1, 4)")
        if not 0 < self.r < 1:
            raise ValueError("coloring parameter r must lie in (0, 1)")
        kp, k = kappa_of(self.q)
        object.__setattr__(self, "kappa_prime", kp)
        object.__setattr__(self, "kappa", k)


@dataclass(frozen=True)
class ContinuumParams:
    rho_b: float
    rho_r: float
    rho_b_prime: float
    rho_r_prime: float


def rho_params(kappa_prime, r):
    """SLE weight block (rho_B, rho_R, rho'_B, rho'_R) at (kappa', r).

    rho_B = (2/pi) * angle - 2 with the angle branch in (0, pi);
    rho_R = kappa - 6 - rho_B and the primed weights are the
    -(kappa'/4)(rho + 2) images.  Interval violations raise BranchError.
    """
    if not 4.0 < kappa_prime < 8.0:
        raise ValueError("kappa' must lie in (4, 8)")
    kappa = 16.0 / kappa_prime
    theta = _branch_angle(kappa, r)
    rho_b = (2.0 / math.pi) * theta - 2.0
    if not -2.0 < rho_b < kappa - 4.0:
        raise BranchError(f"rho_B={rho_b} outside (-2, {kappa - 4})")
    rho_r = kappa - 6.0 - rho_b
    rho_b_prime = -(kappa_prime / 4.0) * (rho_b + 2.0)
    rho_r_prime = -(kappa_prime / 4.0) * (rho_r + 2.0)
    lo = kappa_prime / 2.0 - 4.0
    if not (lo < rho_b_prime < 0.0 and lo < rho_r_prime < 0.0):
        raise BranchError("primed weights outside (kappa'/2 - 4, 0)")
    return ContinuumParams(rho_b, rho_r, rho_b_prime, rho_r_prime)


def bulk_exponent(j, kappa):
    """Plane 2j-arm exponent (16 j^2 - (kappa - 4)^2) / (8 kappa)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return (16.0 * j * j - (kappa - 4.0) ** 2) / (8.0 * kappa)


def halfplane_even_exponent(j, kappa):
    """Halfplane 2j-arm exponent 2j (2j + kappa/2 - 2) / kappa; j=1 gives 1."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return 2.0 * j * (2.0 * j + kappa / 2.0 - 2.0) / kappa


def halfplane_odd_exponent(j, kappa, r):
    """Halfplane (2j-1)-arm exponent; r enters through the branch angle.

    Equals (2j + rho_R)(2j + rho_R + 2 - kappa/2) / kappa with rho_R from
    :func:`rho_params`; both forms are computed and cross-checked.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    a = (2.0 / math.pi) * _branch_angle(kappa, r)
    value = (2.0 * j + kappa - 4.0 - a) * (2.0 * j + (kappa - 4.0) / 2.0 - a) \
        / kappa
    rho_r = kappa - 4.0 - a  # = kappa - 6 - rho_B
    alt = (2.0 * j + rho_r) * (2.0 * j + rho_r + 2.0 - kappa / 2.0) / kappa
    if abs(value - alt) > 1e-9:
        raise BranchError("odd-exponent forms disagree")
    return value


def exponent_for(tau, setting, params):
    """Predicted arm exponent of a color sequence, or None if not covered.

    Plane sequences dispatch on the cyclic interface count I (monochromatic
    sequences have no known exponent and yield None); halfplane sequences
    dispatch on the linear count I+, with r replaced by 1 - r when the
    sequence starts blue.
    """
    cyclic, linear_plus = interface_count(tau)
    if setting == PLANE_MODE:
        if cyclic == 0:
            return None
        return bulk_exponent(cyclic // 2, params.kappa)
    if setting != HALFPLANE_MODE:
        raise ValueError(f"unknown setting {setting!r}")
    r = params.r if tau[0] == RED else 1.0 - params.r
    if linear_plus % 2 == 0:
        return halfplane_even_exponent(linear_plus // 2, params.kappa)
    return halfplane_odd_exponent((linear_plus + 1) // 2, params.kappa, r)
