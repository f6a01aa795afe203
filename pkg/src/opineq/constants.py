"""Generalized Kantorovich constant K(h, p) and Specht ratio S(h).

K(h, p) = (h^p - h)/((p-1)(h-1)) * ((p-1)/p * (h^p - 1)/(h^p - h))^p

is the sharp constant of the reverse Jensen inequalities for power functions
under unital positive maps;

S(h) = (h - 1) h^{1/(h-1)} / (e log h),  S(1) = 1

is its p -> 0 limit, S(h) = lim_r K(h^r, 1/r).  Each factor of K is positive
for every h > 0 (h != 1) and p outside {0, 1}, so the evaluation works in
log space to keep large h^p from overflowing; the removable singularities at
p in {0, 1} and h = 1 are fixed to their known value 1 by explicit branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ConditionNumber",
    "kantorovich",
    "specht",
    "kantorovich_specht_limit",
]

_P_BRANCH = 1e-8
_H_BRANCH = 1e-8


@dataclass(frozen=True)
class ConditionNumber:
    """Generalized condition number, normalized to h >= 1.

    K(h, p) = K(1/h, p), so inputs below 1 describe the same constant; the
    constructor folds them.
    """

    h: float

    def __post_init__(self):
        if not self.h > 0.0:
            raise ValueError(f"condition number must be positive, got {self.h}")
        if self.h < 1.0:
            object.__setattr__(self, "h", 1.0 / self.h)


def kantorovich(h: float, p: float) -> float:
    """Generalized Kantorovich constant K(h, p) for h > 0 and any real p."""
    h = float(h)
    p = float(p)
    if not h > 0.0:
        raise ValueError(f"h must be positive, got {h}")
    if abs(h - 1.0) < _H_BRANCH or abs(p) < _P_BRANCH or abs(p - 1.0) < _P_BRANCH:
        return 1.0
    hp = h**p
    base1 = (hp - h) / ((p - 1.0) * (h - 1.0))
    base2 = ((p - 1.0) / p) * (hp - 1.0) / (hp - h)
    return math.exp(math.log(base1) + p * math.log(base2))


def specht(h: float) -> float:
    """Specht ratio S(h) >= 1; S(h) = S(1/h) and S(1) = 1."""
    h = float(h)
    if not h > 0.0:
        raise ValueError(f"h must be positive, got {h}")
    if abs(h - 1.0) < _H_BRANCH:
        # second-order expansion around the 0/0 point at h = 1
        return 1.0 + (h - 1.0) ** 2 / 8.0
    return (h - 1.0) * h ** (1.0 / (h - 1.0)) / (math.e * math.log(h))


def kantorovich_specht_limit(h: float, p: float, r: float) -> float:
    """Evaluate K(h^r, p/r), which tends to S(h^p) as r -> 0."""
    if r == 0.0:
        raise ValueError("r must be nonzero (the r -> 0 value is specht(h**p))")
    return kantorovich(float(h) ** float(r), float(p) / float(r))
