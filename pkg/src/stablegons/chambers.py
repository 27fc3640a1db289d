"""Exact wall-and-chamber arithmetic for side-length vectors of spatial polygons.

A closed n-gon in 3-space with side lengths r = (r_1, ..., r_n) exists exactly
when r lies in the cone defined by r_i <= sum_{j != i} r_j for all i.  Inside
that cone, the deformation space of polygons changes type only when r crosses
one of the interior walls

    sum_{j in J} r_j  =  sum_{j not in J} r_j,        2 <= |J| <= n - 2,

and a wall is the same for J and its complement.  Everything below is computed
over exact rationals: wall membership is a knife-edge predicate, so floating
point has no business deciding it.

The module also carries the bookkeeping that feeds the bubble-tree machinery:
which subsets J may acquire a bubble (the "relevant" ones, where J is the
lighter side of its wall), the legal open range for the bubble slack epsilon_J,
and the augmented vector (r_J, sum_J r_j - epsilon_J) that prescribes the
bubble's side lengths.  The augmented vector always lands in the chamber where
its last edge dominates, so the new edge can never degenerate with others.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .errors import InvalidArgument, RangeError

__all__ = [
    "rational",
    "LengthVector",
    "WallIndex",
    "ChamberSignature",
    "EpsilonAssignment",
    "wall_margin",
    "all_walls",
    "signature",
    "same_chamber",
    "central_base",
    "is_favorable",
    "favorable_index",
    "nabla_index",
    "line_gons",
    "ClassifyReport",
    "classify",
    "relevant_subsets",
    "epsilon_range",
    "canonical_epsilon",
    "augment",
]


def rational(x) -> Fraction:
    """Coerce x to an exact Fraction.

    Strings are parsed exactly ("3.5" means 7/2); floats are taken at their
    exact binary64 value.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise InvalidArgument(f"cannot interpret {x!r} as an exact rational")


class LengthVector:
    """Side lengths of an n-gon, kept as exact rationals.

    All entries must be positive; whether the vector lies in the interior of
    the polygon cone is reported by :meth:`in_cone_interior`, not enforced.
    """

    __slots__ = ("r",)

    def __init__(self, lengths: Iterable):
        r = tuple(rational(x) for x in lengths)
        if len(r) < 2:
            raise InvalidArgument("a length vector needs at least 2 entries")
        if any(x <= 0 for x in r):
            raise InvalidArgument("all side lengths must be positive")
        self.r = r

    @property
    def n(self) -> int:
        return len(self.r)

    def perimeter(self) -> Fraction:
        return sum(self.r, Fraction(0))

    def normalized(self) -> tuple:
        """The rescaled vector 2r/perimeter (sums to 2)."""
        L = self.perimeter()
        return tuple(2 * x / L for x in self.r)

    def in_cone_interior(self) -> bool:
        L = self.perimeter()
        return all(2 * x < L for x in self.r)

    def on_cone_boundary(self) -> bool:
        L = self.perimeter()
        return all(2 * x <= L for x in self.r) and any(2 * x == L for x in self.r)

    def scaled(self, factor) -> "LengthVector":
        f = rational(factor)
        if f <= 0:
            raise InvalidArgument("scale factor must be positive")
        return LengthVector(x * f for x in self.r)

    def subset_sum(self, J: Iterable[int]) -> Fraction:
        return sum((self.r[j - 1] for j in J), Fraction(0))

    def multiset(self) -> tuple:
        return tuple(sorted(self.r))

    def __len__(self):
        return len(self.r)

    def __getitem__(self, i):
        return self.r[i]

    def __iter__(self):
        return iter(self.r)

    def __eq__(self, other):
        return isinstance(other, LengthVector) and self.r == other.r

    def __hash__(self):
        return hash(self.r)

    def __repr__(self):
        return "LengthVector((%s))" % ", ".join(str(x) for x in self.r)


def as_length_vector(r) -> LengthVector:
    return r if isinstance(r, LengthVector) else LengthVector(r)


def _check_subset(J, n) -> tuple:
    """Validate J as a proper nonempty subset of {1..n}; return it sorted."""
    J = tuple(sorted(set(int(j) for j in J)))
    if not J:
        raise InvalidArgument("J must be nonempty")
    if J[0] < 1 or J[-1] > n:
        raise InvalidArgument(f"J={J} is not a subset of {{1..{n}}}")
    if len(J) >= n:
        raise InvalidArgument("J must be a proper subset")
    return J


@dataclass(frozen=True)
class WallIndex:
    """Canonical name for an interior wall: the side of {J, J^c} avoiding n.

    Only 2 <= |J| <= n-2 define interior walls; singleton sides are facets of
    the cone and are excluded.
    """

    J: tuple
    n: int

    def __init__(self, J, n: int):
        J = _check_subset(J, n)
        if n in J:
            J = tuple(i for i in range(1, n + 1) if i not in J)
        if not (2 <= len(J) <= n - 2):
            raise InvalidArgument(
                f"|J|={len(J)} does not name an interior wall for n={n}"
            )
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "n", n)

    def complement(self) -> tuple:
        return tuple(i for i in range(1, self.n + 1) if i not in self.J)

    def __repr__(self):
        return f"W{list(self.J)}"


def wall_margin(r, J) -> Fraction:
    """sum_{j in J} r_j - sum_{j not in J} r_j, exactly.

    Antisymmetric under complement; zero iff r sits on the wall named by J.
    """
    r = as_length_vector(r)
    J = _check_subset(J, r.n)
    inside = r.subset_sum(J)
    return 2 * inside - r.perimeter()


def all_walls(n: int):
    """All interior walls of the n-gon cone, canonically indexed."""
    if n < 3:
        raise InvalidArgument("need n >= 3")
    out = []
    for k in range(2, n - 1):
        for J in itertools.combinations(range(1, n), k):
            out.append(WallIndex(J, n))
    return out


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


class ChamberSignature:
    """Sign of the wall margin at each canonical interior wall.

    Two off-wall vectors lie in the same (maximal) chamber iff their
    signatures agree; agreeing zeros identify a common lower-dimensional
    chamber on the walls themselves.
    """

    __slots__ = ("n", "signs")

    def __init__(self, n: int, signs: dict):
        self.n = n
        self.signs = dict(signs)

    @classmethod
    def of(cls, r) -> "ChamberSignature":
        r = as_length_vector(r)
        signs = {w: _sign(wall_margin(r, w.J)) for w in all_walls(r.n)}
        return cls(r.n, signs)

    def zeros(self):
        return sorted(w.J for w, s in self.signs.items() if s == 0)

    def __eq__(self, other):
        return (
            isinstance(other, ChamberSignature)
            and self.n == other.n
            and self.signs == other.signs
        )

    def __hash__(self):
        return hash((self.n, tuple(sorted((w.J, s) for w, s in self.signs.items()))))

    def to_json(self):
        return [
            {"J": list(w.J), "sign": s}
            for w, s in sorted(self.signs.items(), key=lambda p: (len(p[0].J), p[0].J))
        ]


def signature(r) -> ChamberSignature:
    return ChamberSignature.of(r)


def same_chamber(r1, r2) -> bool:
    return signature(r1) == signature(r2)


def central_base(n: int) -> LengthVector:
    """Deterministic representative of the chamber around the all-ones ray.

    For odd n the ray itself is off every wall.  For even n it sits on all
    half-size walls, so we perturb by distinct powers of two: every subset sum
    of the perturbation weights is distinct, which guarantees the perturbed
    point is off every wall (coordinate-linear perturbations such as (1,2,...,n)
    fail already at n=8, where {1,2,7,8} and {3,4,5,6} have equal weight).
    """
    if n < 3:
        raise InvalidArgument("need n >= 3")
    if n % 2 == 1:
        return LengthVector([1] * n)
    delta = Fraction(1, n**3 * 2**n)
    return LengthVector(1 + delta * 2 ** (i - 1) for i in range(1, n + 1))


def is_favorable(r, i: int) -> bool:
    """Does edge i dominate, i.e. r_i + r_j > sum of the rest for every j?

    Equivalent to the normalized condition r̄_i + r̄_j > 1 for all j != i.
    """
    r = as_length_vector(r)
    if not 1 <= i <= r.n:
        raise InvalidArgument(f"index {i} out of range")
    return all(wall_margin(r, (i, j)) > 0 for j in range(1, r.n + 1) if j != i)


def favorable_index(r) -> Optional[int]:
    """The unique dominating edge index, or None.

    For n >= 4 at most one index can dominate (a dominating edge is strictly
    the longest).  For n = 3 every index passes the defining inequalities on
    interior input, so no single index is reported.
    """
    r = as_length_vector(r)
    hits = [i for i in range(1, r.n + 1) if is_favorable(r, i)]
    return hits[0] if len(hits) == 1 else None


def nabla_index(r) -> Optional[int]:
    """The unique i with r̄_j + r̄_k > 1 for all j, k != i, or None.

    Summing the pair inequalities shows the condition is unsatisfiable for
    n >= 5; it carves out a genuine chamber only for n = 4, where the polygon
    space is a product of projective lines (trivially so, being a single one).
    """
    r = as_length_vector(r)
    hits = []
    for i in range(1, r.n + 1):
        others = [j for j in range(1, r.n + 1) if j != i]
        if all(
            wall_margin(r, (j, k)) > 0 for j, k in itertools.combinations(others, 2)
        ):
            hits.append(i)
    return hits[0] if len(hits) == 1 else None


def line_gons(r):
    """Canonical walls on which r sits exactly.

    Each names a polygon lying on a straight line (edges J one way, the rest
    the other way); for n >= 5 these are the isolated singular points of the
    polygon space.
    """
    r = as_length_vector(r)
    return [w.J for w in all_walls(r.n) if wall_margin(r, w.J) == 0]


@dataclass
class ClassifyReport:
    in_cone_interior: bool
    signature: ChamberSignature
    walls_on: list
    line_gons: list
    smooth: bool
    favorable_index: Optional[int]
    nabla_index: Optional[int]
    central: bool

    def to_json(self):
        return {
            "in_cone_interior": self.in_cone_interior,
            "signature": self.signature.to_json(),
            "walls_on": [list(J) for J in self.walls_on],
            "line_gons": [list(J) for J in self.line_gons],
            "smooth": self.smooth,
            "favorable_index": self.favorable_index,
            "nabla_index": self.nabla_index,
            "central": self.central,
        }


def classify(r, base: Optional[LengthVector] = None) -> ClassifyReport:
    """Full exact chamber report for a positive length vector.

    `base` overrides the reference point used for the centrality test (needed
    to pin down one chamber among those meeting the all-ones ray when n is
    even); by default :func:`central_base` is used.
    """
    r = as_length_vector(r)
    sig = signature(r)
    on = sig.zeros()
    if base is None:
        base = central_base(r.n)
    base_sig = signature(base)
    central = sig == base_sig
    return ClassifyReport(
        in_cone_interior=r.in_cone_interior(),
        signature=sig,
        walls_on=on,
        line_gons=list(on),
        smooth=not on,
        favorable_index=favorable_index(r),
        nabla_index=nabla_index(r),
        central=central,
    )


def relevant_subsets(r, min_size: int = 2, with_margins: bool = False):
    """All J with min_size <= |J| <= n-2 that are the light side of their wall.

    "Light" is non-strict: sum_J r_j <= sum_{J^c} r_j.  Equality cases are the
    line-gon walls; request margins to see them flagged.  Only these subsets
    can index a bubble.  Sorted lexicographically.
    """
    r = as_length_vector(r)
    if not r.in_cone_interior():
        raise InvalidArgument("r must lie in the interior of the polygon cone")
    out = []
    for k in range(max(2, min_size), r.n - 1):
        for J in itertools.combinations(range(1, r.n + 1), k):
            m = wall_margin(r, J)
            if m <= 0:
                out.append((J, m) if with_margins else J)
    out.sort(key=lambda item: item[0] if with_margins else item)
    return out


def epsilon_range(r, J) -> tuple:
    """Legal open range (0, 2 min_{j in J} r_j) for the bubble slack at J."""
    r = as_length_vector(r)
    J = _check_subset(J, r.n)
    if not (2 <= len(J) <= r.n - 2):
        raise InvalidArgument(f"|J|={len(J)} cannot index a bubble")
    if wall_margin(r, J) > 0:
        raise InvalidArgument(f"J={list(J)} is not relevant for this r")
    return (Fraction(0), 2 * min(r.r[j - 1] for j in J))


def canonical_epsilon(r) -> Fraction:
    """The canonical slack min_i r_i, legal for every relevant subset."""
    r = as_length_vector(r)
    return min(r.r)


def augment(r, J, eps_J) -> LengthVector:
    """The bubble's length vector (r_J, sum_J r_j - eps_J).

    Requires J relevant and eps_J strictly inside its legal range; the result
    is always in the chamber dominated by its last edge, so the new edge can
    never degenerate together with others.
    """
    r = as_length_vector(r)
    eps = rational(eps_J)
    lo, hi = epsilon_range(r, J)
    if not lo < eps < hi:
        raise RangeError(
            f"eps_J={eps} violates the legal range 0 < eps_J < {hi} "
            f"(= 2 min over J of r_j) for J={sorted(J)}"
        )
    J = _check_subset(J, r.n)
    tail = r.subset_sum(J) - eps
    out = LengthVector([r.r[j - 1] for j in J] + [tail])
    assert is_favorable(out, out.n), "augmented vector left the dominated chamber"
    return out


class EpsilonAssignment:
    """A choice of slack eps_J for each relevant subset J.

    Explicit entries live in `eps`; `default` (if set) answers for any other
    subset, which is how the canonical choice eps_J = min_i r_i is carried
    without materializing all 2^(n-1) subsets.
    """

    def __init__(self, eps=None, default=None):
        self.eps = {}
        if eps:
            for J, v in dict(eps).items():
                self.eps[frozenset(int(j) for j in J)] = rational(v)
        self.default = None if default is None else rational(default)

    @classmethod
    def canonical(cls, r) -> "EpsilonAssignment":
        return cls(default=canonical_epsilon(r))

    def get(self, J) -> Fraction:
        key = frozenset(int(j) for j in J)
        if key in self.eps:
            return self.eps[key]
        if self.default is not None:
            return self.default
        raise InvalidArgument(f"no epsilon assigned for J={sorted(key)}")

    def legal_for(self, r) -> bool:
        """Are all explicit entries (and the default) inside their ranges?"""
        r = as_length_vector(r)
        for key, v in self.eps.items():
            bound = 2 * min(r.r[j - 1] for j in key)
            if not 0 < v < bound:
                return False
        if self.default is not None and not 0 < self.default:
            return False
        return True

    def to_json(self):
        body = {
            ",".join(str(j) for j in sorted(k)): str(v) for k, v in self.eps.items()
        }
        return {"eps": body, "default": None if self.default is None else str(self.default)}
