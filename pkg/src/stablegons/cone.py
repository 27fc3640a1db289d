"""The parameter cone of (length, slack) pairs over the central chamber.

Each choice of a central length vector r together with a legal slack eps_J
for every relevant subset of more than two edges pins down one symplectic
class on the stable compactification; pair bubbles are rigid and contribute
nothing.  The number of free parameters is therefore

    n + #{relevant J with |J| > 2}  =  2^(n-1) - (n^2 - n + 2) / 2,

matching the rank of the second cohomology of the target space, and the set
of all legal pairs is a convex cone.  This module makes that bookkeeping
executable: membership tests, the linear chart theta on the central chamber,
the dimension count, and a deterministic sampler.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .chambers import (
    EpsilonAssignment,
    LengthVector,
    as_length_vector,
    central_base,
    relevant_subsets,
    signature,
)
from .errors import InvalidArgument

__all__ = [
    "central_contains",
    "central_report",
    "theta",
    "ParamPoint",
    "param_contains",
    "param_dim",
    "param_sample",
]


def _require_n(r: LengthVector):
    if r.n < 5:
        raise InvalidArgument("the central-chamber cone needs n >= 5")


def central_contains(r, base: Optional[LengthVector] = None) -> bool:
    """Is r strictly inside the central chamber?

    For odd n this is the unique chamber containing the all-ones ray; for
    even n the ray lies on walls and the chamber is the one singled out by
    the deterministic base point (overridable via `base`).
    """
    r = as_length_vector(r)
    _require_n(r)
    if not r.in_cone_interior():
        return False
    if base is None:
        base = central_base(r.n)
    return signature(r) == signature(base)


def central_report(r, base: Optional[LengthVector] = None) -> dict:
    """Membership plus the walls r sits on (why boundary points fail)."""
    r = as_length_vector(r)
    _require_n(r)
    sig = signature(r)
    return {
        "contains": central_contains(r, base),
        "walls_on": [list(J) for J in sig.zeros()],
    }


def theta(r, base: Optional[LengthVector] = None) -> tuple:
    """Chart coordinates of the symplectic class of r on the central chamber.

    The identification is linear and injective there, so the coordinates are
    just r itself; outside the chamber the chart is undefined.
    """
    r = as_length_vector(r)
    if not central_contains(r, base):
        raise InvalidArgument("theta is only defined on the central chamber")
    return r.r


@dataclass
class ParamPoint:
    """A length vector in the central chamber plus slacks for R_{>2}(r)."""

    r: LengthVector
    eps: EpsilonAssignment

    def to_json(self):
        return {"r": [str(x) for x in self.r.r], "eps": self.eps.to_json()}


def param_contains(p: ParamPoint, base: Optional[LengthVector] = None) -> bool:
    """Is (r, eps) in the parameter cone?

    Needs r strictly central and, for every relevant J with |J| > 2, a slack
    assigned strictly inside (0, 2 min_J r_j).
    """
    if not central_contains(p.r, base):
        return False
    for J in relevant_subsets(p.r, 3):
        try:
            e = p.eps.get(J)
        except InvalidArgument:
            return False
        if not 0 < e < 2 * min(p.r.r[j - 1] for j in J):
            return False
    return True


def param_dim(n: int) -> int:
    """Number of parameters: 2^(n-1) - (n^2 - n + 2)/2."""
    if n < 5:
        raise InvalidArgument("need n >= 5")
    return 2 ** (n - 1) - (n * n - n + 2) // 2


def param_sample(n: int, seed: int = 0) -> ParamPoint:
    """Deterministic sample of the parameter cone near the all-ones ray.

    The length jitter stays small enough (exact-rational bookkeeping) that no
    wall sign can flip relative to the base point; every slack is drawn
    uniformly from its open range.  Each sampled point satisfies
    n + #R_{>2}(r) = param_dim(n).
    """
    if n < 5:
        raise InvalidArgument("need n >= 5")
    rng = random.Random(1_000_003 * int(seed) + n)
    base = central_base(n)
    # margins at the base are at least delta = 1/(n^3 2^n) for even n and at
    # least 1 for odd n; scale the jitter to stay well below that
    floor = Fraction(1) if n % 2 == 1 else Fraction(1, n**3 * 2**n)
    scale = floor / (4 * n)
    r = LengthVector(
        b + scale * Fraction(rng.randint(0, n * n), n * n) for b in base.r
    )
    assert central_contains(r), "sampler left the central chamber"
    eps = {}
    for J in relevant_subsets(r, 3):
        hi = 2 * min(r.r[j - 1] for j in J)
        eps[J] = hi * Fraction(rng.randint(1, 63), 64)
    point = ParamPoint(r=r, eps=EpsilonAssignment(eps))
    assert n + len(eps) == param_dim(n), "dimension bookkeeping failed"
    return point
