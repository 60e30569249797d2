"""Phase diagram of symmetry versus symmetry breaking in the (alpha, p) plane.

Everything is stated for alpha >= -1/2; points with alpha < -1/2 are
reflected through alpha -> -1 - alpha first.  The classifier is
conservative: the gap between the proven-symmetric and proven-broken
regions is reported as ``Unknown``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from .closed_forms import in_lambda
from .spinor_harmonics import AngularMode, delta_coeff


class Verdict(str, Enum):
    SYMMETRIC = "ProvenSymmetric"
    BROKEN = "ProvenBroken"
    UNKNOWN = "Unknown"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    witness: Optional[str] = None


def _check_open_p(p: float) -> None:
    if not (2.0 < p < 6.0):
        raise ValueError(f"p must lie in (2, 6), got {p}")


def _sqrt_a0(p: float) -> float:
    return math.sqrt(-3.0 * p * p + 20.0 * p - 12.0)


def alpha_curve(i: int, p: float) -> float:
    """Threshold curves alpha_0 .. alpha_5 as functions of p."""
    _check_open_p(p)
    if i == 0:
        return (4.0 - _sqrt_a0(p)) / (2.0 * (p - 2.0))
    if i == 1:
        return ((2.0 * p * p - 7.0 * p - 6.0 - math.sqrt(3.0 * (19.0 * p * p - 20.0 * p + 12.0)))
                / (4.0 * p * (p - 2.0)))
    if i == 2:
        return ((p * p - 2.0 * p + 24.0 - 2.0 * math.sqrt(3.0 * (11.0 * p * p - 4.0 * p + 12.0)))
                / (2.0 * (p - 2.0) * (p + 6.0)))
    if i == 3:
        return (6.0 - p) / (2.0 * (p - 2.0))
    if i == 4:
        return (3.0 * p - 10.0 + _sqrt_a0(p)) / (4.0 * (p - 2.0))
    if i == 5:
        return ((2.0 * p * p + 5.0 * p - 30.0 + math.sqrt(3.0 * (19.0 * p * p - 20.0 * p + 12.0)))
                / (4.0 * (p - 2.0) * (p + 3.0)))
    raise ValueError(f"curve index must be in 0..5, got {i}")


# Domains on which each p-curve marks the sign change of its channel index.
P1_ALPHA_MAX = (1.0 - math.sqrt(3.0)) / 4.0
P2_ALPHA_MAX = (1.0 - math.sqrt(2.0)) / 2.0
P5_ALPHA_MIN = (3.0 + math.sqrt(3.0)) / 6.0

# Channel whose index changes sign across each p-curve.
CURVE_CHANNEL = {1: AngularMode(1, 1), 2: AngularMode(-2, 1), 5: AngularMode(1, 1)}


def p_curve(j: int, alpha: float) -> float:
    """Instability thresholds p_1, p_2, p_5 in their alpha-domains."""
    if j == 1:
        if not (-0.5 <= alpha < P1_ALPHA_MAX):
            raise ValueError(f"p_1 is defined for alpha in [-1/2, {P1_ALPHA_MAX:.6f}), got {alpha}")
        return (5.0 - 4.0 * alpha + math.sqrt(8.0 * alpha * (2.0 * alpha - 11.0) + 97.0)) / (2.0 * (1.0 - 2.0 * alpha))
    if j == 2:
        if not (-0.5 <= alpha < P2_ALPHA_MAX):
            raise ValueError(f"p_2 is defined for alpha in [-1/2, {P2_ALPHA_MAX:.6f}), got {alpha}")
        return 2.0 * (2.0 * (1.0 + alpha) + math.sqrt(16.0 * alpha * alpha + 32.0 * alpha + 13.0)) / (1.0 - 2.0 * alpha)
    if j == 5:
        if not (alpha > P5_ALPHA_MIN) or in_lambda(alpha):
            raise ValueError(f"p_5 is defined for alpha > {P5_ALPHA_MIN:.6f} outside Lambda, got {alpha}")
        disc = 25.0 * alpha * alpha - 64.0 * alpha + 40.0
        if disc < 0:
            raise ValueError(f"p_5 is not real at alpha={alpha}")
        return (2.0 - alpha + math.sqrt(disc)) / (2.0 * alpha - 1.0)
    raise ValueError(f"curve index must be 1, 2 or 5, got {j}")


def stability_index(k: int, m, alpha: float, p: float) -> float:
    """Minimum of the second variation at the symmetric optimizer, restricted
    to the single channel (k, m).  Negative means linearly unstable.

    ``m`` is the half-integer itself (e.g. 0.5).  Requires alpha > -1/2.
    """
    mode = AngularMode.of(k, m)
    _check_open_p(p)
    if not alpha > -0.5:
        raise ValueError("stability_index needs alpha > -1/2; reflect first")
    if in_lambda(alpha) and alpha != 0.5:
        raise ValueError(f"alpha={alpha} lies in Lambda")
    return _index_value(mode, alpha, p)


def _index_value(mode: AngularMode, alpha: float, p: float) -> float:
    gap = abs(alpha - 0.5)
    a = 0.5 * p * gap * gap
    b = 0.5 * (p - 2.0) * gap
    a_km = (1.0 + (p - 2.0) * delta_coeff(mode)) * a
    return (mode.k - alpha + 0.5) ** 2 - 0.25 * (math.sqrt(4.0 * a_km + b * b) - b) ** 2


def reflect_alpha(alpha: float) -> float:
    return -1.0 - alpha if alpha < -0.5 else alpha


def in_symmetry_zone(alpha: float, p: float) -> Tuple[bool, Optional[str]]:
    """Membership in the union of proven-symmetric zones, with a zone tag."""
    _check_open_p(p)
    a = reflect_alpha(alpha)
    if -0.5 < a <= 0.0 and p <= 2.0 * (3.0 + 4.0 * (a + 1.0) ** 2) / (3.0 + 4.0 * a * a):
        return True, "SymZone1"
    if 0.0 < a < 1.0 and a != 0.5:
        bound = min(2.0 * (3.0 + 2.0 * a) / (1.0 + 2.0 * a),
                    2.0 * (7.0 - 10.0 * a + 4.0 * a * a) / (3.0 - 6.0 * a + 4.0 * a * a))
        if p <= bound:
            return True, "SymZone2"
    if 0.0 <= a < 0.5:
        return True, "MonotoneZone[0,1/2)"
    if 0.5 < a < min(alpha_curve(3, p), alpha_curve(4, p)):
        return True, "MonotoneZone(1/2,min(a3,a4))"
    return False, None


def _broken_witness(a: float, p: float) -> Optional[str]:
    if a > 1.0:
        return "alpha>1"
    candidates = []
    if a < max(alpha_curve(1, p), alpha_curve(2, p)):
        candidates = [(-2, 0.5), (1, 0.5)]
    elif a > alpha_curve(5, p):
        candidates = [(1, 0.5)]
    for k, m in candidates:
        # alpha = -1/2 is admitted here by continuity of the index
        q = _index_value(AngularMode.of(k, m), a, p)
        if q < 0:
            return f"channel ({k},{m:g}) index={q:.6g}"
    return None


def classify(alpha: float, p: float) -> Classification:
    a = reflect_alpha(alpha)
    if in_lambda(a) or not (2.0 < p < 6.0):
        return Classification(Verdict.DEGENERATE, "alpha in Lambda" if in_lambda(a) else "p outside (2,6)")
    broken = _broken_witness(a, p)
    symmetric, zone = in_symmetry_zone(a, p)
    if broken is not None and symmetric:
        raise AssertionError(f"({alpha}, {p}) classified both symmetric ({zone}) and broken ({broken})")
    if broken is not None:
        return Classification(Verdict.BROKEN, broken)
    if symmetric:
        return Classification(Verdict.SYMMETRIC, zone)
    return Classification(Verdict.UNKNOWN, None)
