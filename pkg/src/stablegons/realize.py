"""Numerical realization of polygons with prescribed side lengths.

A polygon is stored as its unit edge directions u_1, ..., u_n on the sphere
together with the lengths; closing it means solving sum_i r_i u_i = 0, the
zero level of the momentum of the rotation action on the product of spheres.
:func:`close` finds a zero by projected gradient descent with Armijo
backtracking, which converges from a random start whenever the length vector
lies strictly inside the polygon cone.

The rotation gauge is fixed by :func:`canonicalize`; the marked-point picture
enters through stereographic projection: the directions become points on the
Riemann sphere, defined up to Mobius transformations, and two frames represent
the same point of the moduli space exactly when their normalized marked-point
tuples agree (:func:`moduli_point`, :func:`pgl2_equivalent`).

:func:`transport` changes the length of the closing edge without moving the
underlying moduli point: a Mobius "boost" is applied to the direction
configuration and re-balanced for the new weights by a damped Newton
iteration over the three boost parameters.  This realizes the canonical
identification between polygon spaces whose length vectors share a chamber,
and powers the incidence test :func:`incidence` that ties a bubble candidate
to the sub-polygon it should shadow.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .chambers import (
    LengthVector,
    as_length_vector,
    rational,
    same_chamber,
    _check_subset,
)
from .errors import (
    ChamberMismatch,
    InvalidArgument,
    NoModuli,
    NonConvergence,
)

__all__ = [
    "Tolerances",
    "EdgeFrame",
    "ModuliPoint",
    "close",
    "close_degenerate",
    "canonicalize",
    "diagonal",
    "parallel_classes",
    "is_line_gon",
    "moduli_point",
    "pgl2_distance",
    "pgl2_equivalent",
    "subpolygon",
    "transport",
    "incidence",
    "gradient",
]

FREE_EDGE = 0  # label of the closing edge of a sub-polygon or bubble


@dataclass(frozen=True)
class Tolerances:
    """Numeric slack for the geometric predicates; every one is overridable."""

    closure: float = 1e-10
    angle: float = 1e-8
    mobius: float = 1e-8

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **kw)


DEFAULT_TOL = Tolerances()


class EdgeFrame:
    """A polygon: exact lengths, float shadows, unit directions.

    `labels` names the edges; plain polygons carry (1, ..., n) and sub-polygon
    or bubble frames carry the original labels plus FREE_EDGE (= 0) for the
    closing edge.
    """

    __slots__ = ("lengths", "r", "u", "labels")

    def __init__(self, lengths, u, labels=None):
        self.lengths = as_length_vector(lengths)
        self.r = np.array([float(x) for x in self.lengths.r], dtype=float)
        u = np.asarray(u, dtype=float)
        if u.shape != (len(self.r), 3):
            raise InvalidArgument(f"direction array must be ({len(self.r)}, 3)")
        norms = np.linalg.norm(u, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise InvalidArgument("directions must be unit vectors (within 1e-12)")
        self.u = u
        if labels is None:
            labels = tuple(range(1, len(self.r) + 1))
        self.labels = tuple(labels)
        if len(self.labels) != len(self.r):
            raise InvalidArgument("one label per edge required")

    @property
    def n(self) -> int:
        return len(self.r)

    def closing_sum(self) -> np.ndarray:
        return self.r @ self.u

    @property
    def residual(self) -> float:
        return float(np.linalg.norm(self.closing_sum()))

    def is_closed(self, tol: float = DEFAULT_TOL.closure) -> bool:
        return self.residual <= tol

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidArgument(f"no edge labelled {label} in this frame") from None

    def rotated(self, R: np.ndarray) -> "EdgeFrame":
        return EdgeFrame(self.lengths, self.u @ R.T, self.labels)

    def copy(self) -> "EdgeFrame":
        return EdgeFrame(self.lengths, self.u.copy(), self.labels)

    def to_json(self):
        return {
            "r": [float(x) for x in self.r],
            "u": [[float(c) for c in row] for row in self.u],
            "residual": self.residual,
        }

    def __repr__(self):
        return f"EdgeFrame(n={self.n}, residual={self.residual:.2e})"


def _unit_rows(u: np.ndarray) -> np.ndarray:
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return _unit_rows(v)


def gradient(r: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Ambient gradient of f(u) = |sum_i r_i u_i|^2, row per direction."""
    v = r @ u
    return 2.0 * np.outer(r, v)


def close(
    r,
    seed=None,
    hints=None,
    tol: Optional[float] = None,
    max_iter: int = 100_000,
) -> EdgeFrame:
    """Close a polygon with the given side lengths.

    Minimizes |sum r_i u_i|^2 over the product of spheres by projected
    gradient steps u_i <- normalize(u_i - eta r_i v) with backtracking on eta,
    until the closing sum has norm at most `tol` (default 1e-10).  The start
    is drawn from `seed` unless explicit `hints` directions are given, so runs
    are deterministic per seed.
    """
    r = as_length_vector(r)
    if not r.in_cone_interior():
        raise InvalidArgument(
            "no closed polygon: r is not interior to the polygon cone"
        )
    if tol is None:
        tol = DEFAULT_TOL.closure
    rf = np.array([float(x) for x in r.r], dtype=float)
    if hints is not None:
        u = _unit_rows(np.asarray(hints, dtype=float))
        if u.shape != (r.n, 3):
            raise InvalidArgument("hints must provide one direction per edge")
    else:
        u = _random_directions(_rng(seed), r.n)

    scale = float(rf @ rf)
    eta = 1.0 / scale
    v = rf @ u
    f = float(v @ v)
    for _ in range(max_iter):
        if np.sqrt(f) <= tol:
            return EdgeFrame(r, u)
        # tangential gradient norm, for the sufficient-decrease test
        g = 2.0 * np.outer(rf, v)
        g_tan = g - (np.sum(g * u, axis=1, keepdims=True)) * u
        g2 = float(np.sum(g_tan * g_tan))
        if g2 <= 1e-300:
            break  # stuck on a collinear critical configuration
        accepted = False
        for _ in range(60):
            cand = _unit_rows(u - eta * np.outer(rf, v))
            vc = rf @ cand
            fc = float(vc @ vc)
            if fc <= f - 1e-4 * eta * g2 / 2.0:
                # refine with the minimum of the quadratic through f(0), the
                # slope -g2/2 at 0, and f(eta); near-collinear quadrilaterals
                # are badly conditioned and plain backtracking crawls there
                curv = (fc - f + 0.5 * g2 * eta) / (eta * eta)
                if curv > 0:
                    eta_star = 0.25 * g2 / curv
                    if eta_star > 0 and abs(eta_star - eta) > 1e-3 * eta:
                        cand2 = _unit_rows(u - eta_star * np.outer(rf, v))
                        v2 = rf @ cand2
                        f2 = float(v2 @ v2)
                        if f2 < fc:
                            cand, vc, fc, eta = cand2, v2, f2, eta_star
                u, v, f = cand, vc, fc
                eta = min(eta * 2.0, 1e6 / scale)
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
    res = float(np.sqrt(f))
    if res <= tol:
        return EdgeFrame(r, u)
    raise NonConvergence(
        f"closing descent stalled at residual {res:.3e} (tol {tol:.1e})",
        residual=res,
    )


def close_degenerate(r, classes, seed=None, tol: Optional[float] = None) -> EdgeFrame:
    """Closed frame degenerate at exactly the given classes.

    Closes the collapsed polygon (each class merged into one edge of the
    summed length) generically, then expands every class back into parallel
    copies of its merged direction.  Closure is exact by construction.  When
    the collapsed vector sits on the cone boundary the configuration is the
    forced line polygon, whose complementary bundle shows up as one extra
    parallel class.
    """
    r = as_length_vector(r)
    classes = [tuple(sorted(set(c))) for c in classes]
    flat = [j for c in classes for j in c]
    if len(set(flat)) != len(flat):
        raise InvalidArgument("classes must be disjoint")
    if any(len(c) < 2 for c in classes):
        raise InvalidArgument("each class needs at least two edges")
    covered = set(flat)
    loose = [j for j in range(1, r.n + 1) if j not in covered]
    merged = [sum((r.r[j - 1] for j in c), Fraction(0)) for c in classes] + [
        r.r[j - 1] for j in loose
    ]
    small = LengthVector(merged)
    if small.on_cone_boundary():
        total = small.perimeter()
        heavy = next(i for i, v in enumerate(small.r) if 2 * v == total)
        su = np.tile(np.array([-1.0, 0.0, 0.0]), (small.n, 1))
        su[heavy] = (1.0, 0.0, 0.0)
        frame = EdgeFrame(small, su)
    elif small.in_cone_interior():
        rng = _rng(seed)
        for _ in range(32):
            frame = close(small, seed=rng, tol=tol)
            # a generic collapsed frame must not introduce accidental parallels
            if all(len(c) == 1 for c in parallel_classes(frame)):
                break
        else:
            raise NonConvergence("could not draw a generic collapsed frame")
    else:
        raise InvalidArgument("collapsed vector leaves the polygon cone")
    u = np.zeros((r.n, 3))
    for ci, c in enumerate(classes):
        for j in c:
            u[j - 1] = frame.u[ci]
    for li, j in enumerate(loose):
        u[j - 1] = frame.u[len(classes) + li]
    return EdgeFrame(r, u)


def _rotation_to(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Rotation matrix mapping unit vector src to unit vector dst."""
    c = float(np.dot(src, dst))
    axis = np.cross(src, dst)
    s = float(np.linalg.norm(axis))
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        # opposite vectors: rotate by pi around any perpendicular axis
        perp = np.array([1.0, 0.0, 0.0])
        if abs(src[0]) > 0.9:
            perp = np.array([0.0, 1.0, 0.0])
        axis = np.cross(src, perp)
        axis /= np.linalg.norm(axis)
        return 2.0 * np.outer(axis, axis) - np.eye(3)
    axis /= s
    K = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)


def _rotation_about_x(angle: float) -> np.ndarray:
    ca, sa = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])


def canonicalize(frame: EdgeFrame, tol: Optional[float] = None) -> EdgeFrame:
    """Fix the rotation gauge.

    Rotates so u_1 = (1,0,0), then spins about the x-axis so the first
    direction not (anti)parallel to u_1 lands in the z = 0 plane with positive
    y.  Line polygons (all directions on the u_1 axis) return after the first
    rotation alone.
    """
    if tol is None:
        tol = DEFAULT_TOL.angle
    x = np.array([1.0, 0.0, 0.0])
    R = _rotation_to(frame.u[0], x)
    u = frame.u @ R.T
    for k in range(1, frame.n):
        perp = u[k].copy()
        perp[0] = 0.0
        norm = float(np.linalg.norm(perp))
        if norm > tol:
            phi = float(np.arctan2(perp[2], perp[1]))
            u = u @ _rotation_about_x(-phi).T
            break
    return EdgeFrame(frame.lengths, _unit_rows(u), frame.labels)


def diagonal(frame: EdgeFrame, J) -> tuple:
    """The closing vector of the sub-polygon on edges J, and its length.

    Returns d_J = -sum_{j in J} r_j u_j; the summation order is immaterial.
    J refers to edge labels.
    """
    J = _check_subset(J, max(frame.labels))
    idx = [frame.index_of(j) for j in J]
    d = -np.sum(frame.r[idx, None] * frame.u[idx], axis=0)
    return d, float(np.linalg.norm(d))


def angle_between(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.arctan2(np.linalg.norm(np.cross(a, b)), np.dot(a, b)))


def parallel_classes(frame: EdgeFrame, tol: Optional[float] = None):
    """Partition of the edge labels into parallel classes.

    Edges are grouped when their directions agree within `tol` radians;
    opposite directions are never grouped.  The relation is closed
    transitively, so near-chains collapse into one class.

    Coupling with diagonal lengths: a class of edges spread over at most
    theta radians loses at most sum_J r_j * theta^2 / 8 of diagonal length,
    so angle tolerance t corresponds to a length slack of order t^2.
    """
    if tol is None:
        tol = DEFAULT_TOL.angle
    n = frame.n
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if angle_between(frame.u[i], frame.u[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(frame.labels[i])
    return sorted(sorted(g) for g in groups.values())


def is_line_gon(frame: EdgeFrame, tol: Optional[float] = None) -> bool:
    """Do all edges lie on one line (each parallel or opposite to the first)?"""
    if tol is None:
        tol = DEFAULT_TOL.angle
    axis = frame.u[0]
    for row in frame.u[1:]:
        a = angle_between(axis, row)
        if min(a, np.pi - a) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# marked points on the Riemann sphere
# ---------------------------------------------------------------------------


def _stereographic_pairs(u: np.ndarray) -> np.ndarray:
    """Homogeneous coordinates of the stereographic images (north pole -> inf).

    Uses whichever of the two equivalent charts (x+iy : 1-z) ~ (1+z : x-iy)
    is better conditioned per point, so the pole itself is exact.
    """
    out = np.empty((len(u), 2), dtype=complex)
    for i, (x, y, z) in enumerate(u):
        if 1.0 - z >= 1.0 + z:
            out[i] = (complex(x, y), complex(1.0 - z))
        else:
            out[i] = (complex(1.0 + z), complex(x, -y))
        out[i] /= np.linalg.norm(out[i])
    return out


def _pair_to_sphere(p: np.ndarray) -> np.ndarray:
    a, b = p
    N = abs(a) ** 2 + abs(b) ** 2
    w = a * np.conj(b)
    return np.array([2.0 * w.real, 2.0 * w.imag, abs(a) ** 2 - abs(b) ** 2]) / N


def _chordal(p, q) -> float:
    num = abs(p[0] * q[1] - q[0] * p[1])
    return num / (np.linalg.norm(p) * np.linalg.norm(q))


def _mobius_to_standard(a, b, c) -> np.ndarray:
    """Matrix of the Mobius map sending homogeneous points a, b, c to 0, 1, inf."""
    det = lambda p, q: p[0] * q[1] - p[1] * q[0]
    k1 = det(b, c)
    k2 = det(b, a)
    return np.array([[a[1] * k1, -a[0] * k1], [c[1] * k2, -c[0] * k2]], dtype=complex)


class ModuliPoint:
    """Marked points on the sphere, normalized so three anchors sit at 0, 1, inf."""

    __slots__ = ("pairs", "anchors")

    def __init__(self, pairs: np.ndarray, anchors: tuple):
        self.pairs = pairs
        self.anchors = anchors

    @property
    def n(self) -> int:
        return len(self.pairs)

    def values(self):
        """Points as complex numbers, with the string "inf" for the pole."""
        out = []
        for a, b in self.pairs:
            if abs(b) <= 1e-14 * abs(a):
                out.append("inf")
            else:
                out.append(a / b)
        return out

    def to_json(self):
        vals = []
        for v in self.values():
            vals.append("inf" if isinstance(v, str) else [v.real, v.imag])
        return {"points": vals, "anchors": list(self.anchors)}


def moduli_point(frame: EdgeFrame, tol: Optional[float] = None) -> ModuliPoint:
    """The marked-point configuration of a closed frame, Mobius-normalized.

    Needs at least three pairwise distinct directions; line polygons have no
    marked-point moduli and are rejected.
    """
    if tol is None:
        tol = DEFAULT_TOL.angle
    frame = canonicalize(frame, tol)
    anchors = []
    for i in range(frame.n):
        if all(angle_between(frame.u[i], frame.u[j]) > tol for j in anchors):
            anchors.append(i)
        if len(anchors) == 3:
            break
    if len(anchors) < 3:
        raise NoModuli(
            "fewer than three distinct directions: no marked-point moduli"
        )
    pairs = _stereographic_pairs(frame.u)
    M = _mobius_to_standard(*(pairs[i] for i in anchors))
    out = pairs @ M.T
    norms = np.linalg.norm(out, axis=1)
    return ModuliPoint(out / norms[:, None], tuple(anchors))


def pgl2_distance(a: ModuliPoint, b: ModuliPoint) -> float:
    """Largest chordal mismatch after re-anchoring b on a's anchor indices.

    Infinity when the configurations cannot be aligned at all (different
    sizes, or b collapses a's anchor triple).
    """
    if a.n != b.n:
        return float("inf")
    trip = [b.pairs[i] for i in a.anchors]
    if (
        _chordal(trip[0], trip[1]) < 1e-13
        or _chordal(trip[0], trip[2]) < 1e-13
        or _chordal(trip[1], trip[2]) < 1e-13
    ):
        return float("inf")  # b collapses a's anchors, so configurations differ
    M = _mobius_to_standard(*trip)
    moved = b.pairs @ M.T
    moved /= np.linalg.norm(moved, axis=1)[:, None]
    return max(_chordal(p, q) for p, q in zip(a.pairs, moved))


def pgl2_equivalent(
    a: ModuliPoint, b: ModuliPoint, tol: Optional[float] = None
) -> bool:
    """Same ordered configuration up to a Mobius map, within chordal `tol`.

    b is re-anchored on a's anchor indices before comparing, so the two need
    not have picked the same normalization.  The margin behind the boolean is
    :func:`pgl2_distance`.
    """
    if tol is None:
        tol = DEFAULT_TOL.mobius
    return pgl2_distance(a, b) <= tol


def subpolygon(frame: EdgeFrame, J) -> EdgeFrame:
    """The sub-polygon on edges J closed by the diagonal.

    Edges keep their labels; the diagonal becomes the FREE_EDGE-labelled
    closing edge.  Its exact length is the binary64 value of |d_J|.
    """
    J = _check_subset(J, max(frame.labels))
    d, length = diagonal(frame, J)
    if length < 1e-14:
        raise InvalidArgument("diagonal vanishes; sub-polygon is degenerate")
    idx = [frame.index_of(j) for j in J]
    u = np.vstack([frame.u[idx], d / length])
    lengths = [frame.lengths.r[i] for i in idx] + [rational(float(length))]
    return EdgeFrame(lengths, u, labels=tuple(J) + (FREE_EDGE,))


# ---------------------------------------------------------------------------
# the canonical isomorphism between closing-length level sets
# ---------------------------------------------------------------------------


def _boost_matrix(a: np.ndarray) -> np.ndarray:
    """exp of the traceless Hermitian matrix with parameter vector a in R^3."""
    K = 0.5 * np.array(
        [
            [a[2], a[0] - 1j * a[1]],
            [a[0] + 1j * a[1], -a[2]],
        ],
        dtype=complex,
    )
    s = 0.5 * float(np.linalg.norm(a))
    if s < 1e-30:
        return np.eye(2, dtype=complex) + K
    return np.cosh(s) * np.eye(2, dtype=complex) + (np.sinh(s) / s) * K


def _rebalance(pairs: np.ndarray, weights: np.ndarray, tol: float) -> np.ndarray:
    """Mobius boost making the weighted directions sum to zero.

    Damped Newton over the three boost parameters; the balanced configuration
    exists and is unique whenever no coincident cluster carries half the total
    weight, which holds strictly inside a chamber.
    """

    def residual(a):
        moved = pairs @ _boost_matrix(a).T
        pts = np.array([_pair_to_sphere(p) for p in moved])
        return weights @ pts, moved

    a = np.zeros(3)
    F, moved = residual(a)
    target = tol * max(1.0, float(np.sum(weights)))
    for _ in range(100):
        if np.linalg.norm(F) <= target:
            return moved
        J = np.empty((3, 3))
        h = 1e-6
        for k in range(3):
            da = np.zeros(3)
            da[k] = h
            Fp, _ = residual(a + da)
            Fm, _ = residual(a - da)
            J[:, k] = (Fp - Fm) / (2 * h)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            step = -J.T @ F
        t = 1.0
        base = float(np.linalg.norm(F))
        for _ in range(40):
            Fc, moved_c = residual(a + t * step)
            if float(np.linalg.norm(Fc)) < base * (1.0 - 1e-4 * t):
                a = a + t * step
                F, moved = Fc, moved_c
                break
            t *= 0.5
        else:
            break
    raise NonConvergence(
        f"conformal rebalancing stalled at residual {np.linalg.norm(F):.3e}",
        residual=float(np.linalg.norm(F)),
    )


def transport(
    frame: EdgeFrame,
    new_last_length,
    J=None,
    tol: Optional[Tolerances] = None,
) -> EdgeFrame:
    """Replace the closing-edge length, keeping the moduli point.

    With J given, the sub-polygon on J (closed by its diagonal) is transported
    instead of the whole frame.  The source and target length vectors must
    share a chamber, checked exactly; the one legal excursion is the total
    collapse target (new length = sum of the others), which returns the line
    configuration.
    """
    if tol is None:
        tol = DEFAULT_TOL
    if J is not None:
        frame = subpolygon(frame, J)
    b = rational(new_last_length)
    lengths = frame.lengths
    body = lengths.r[:-1]
    body_sum = sum(body, Fraction(0))
    if b == body_sum:
        u = np.tile(np.array([1.0, 0.0, 0.0]), (frame.n, 1))
        u[-1] = (-1.0, 0.0, 0.0)
        return EdgeFrame(LengthVector(body + (b,)), u, frame.labels)
    if b <= 0 or b > body_sum:
        raise InvalidArgument(f"target closing length {b} is outside the cone")
    target = LengthVector(body + (b,))
    if not target.in_cone_interior():
        raise InvalidArgument("target vector leaves the interior of the cone")
    if not same_chamber(lengths, target):
        raise ChamberMismatch(
            "source and target closing lengths lie in different chambers; "
            "the canonical identification is only defined within one"
        )
    pairs = _stereographic_pairs(frame.u)
    weights = np.array([float(x) for x in target.r])
    moved = _rebalance(pairs, weights, tol.closure * 1e-2)
    u = np.array([_pair_to_sphere(p) for p in moved])
    out = EdgeFrame(target, _unit_rows(u), frame.labels)
    if out.residual > tol.closure:
        raise NonConvergence(
            f"transported frame residual {out.residual:.3e} above tolerance",
            residual=out.residual,
        )
    return out


@dataclass
class IncidenceReport:
    incident: bool
    collapse: bool
    diagonal_length: float
    window: tuple
    lower_margin: float
    upper_margin: float
    moduli_match: Optional[bool]


def incidence(
    P: EdgeFrame,
    Q: EdgeFrame,
    J,
    tol: Optional[Tolerances] = None,
    report: bool = False,
):
    """Is the bubble candidate Q incident to P along J?

    Requires |d_J(P)| inside the half-open window
    (sum_J r_j - 2 min_J r_j, sum_J r_j]; at the top end (total collapse of
    the J-edges) the window condition alone decides.  Otherwise Q, transported
    to the closing length |d_J(P)|, must match the sub-polygon of P on J as a
    moduli point.
    """
    if tol is None:
        tol = DEFAULT_TOL
    J = _check_subset(J, P.lengths.n)
    if not 2 <= len(J) <= P.lengths.n - 2:
        raise InvalidArgument(f"|J|={len(J)} cannot index a bubble")
    rJ = [P.lengths.r[j - 1] for j in J]
    if Q.n != len(J) + 1:
        raise InvalidArgument(
            f"bubble candidate has {Q.n} edges, expected {len(J) + 1}"
        )
    if not np.allclose(Q.r[:-1], [float(x) for x in rJ], rtol=0, atol=1e-9):
        raise InvalidArgument("bubble candidate does not inherit the J lengths")
    upper = float(sum(rJ))
    lower = upper - 2 * float(min(rJ))
    if not lower + 1e-12 < float(Q.r[-1]) < upper - 1e-12:
        raise InvalidArgument(
            "bubble candidate's closing length is outside the open window; "
            "it cannot come from any legal slack"
        )
    _, d = diagonal(P, J)
    lo_margin = d - lower
    up_margin = upper - d
    collapse = abs(up_margin) <= tol.closure * max(1.0, upper)
    inside = lo_margin > 0 and (d <= upper or collapse)
    match: Optional[bool] = None
    incident = False
    if inside and collapse:
        incident = True
    elif inside:
        QJ = subpolygon(P, J)
        try:
            moved = transport(Q, QJ.lengths.r[-1])
            match = pgl2_equivalent(
                moduli_point(QJ, tol.angle), moduli_point(moved, tol.angle), tol.mobius
            )
        except (NoModuli, NonConvergence, ChamberMismatch):
            match = False
        incident = bool(match)
    if report:
        return IncidenceReport(
            incident=incident,
            collapse=collapse,
            diagonal_length=d,
            window=(lower, upper),
            lower_margin=lo_margin,
            upper_margin=up_margin,
            moduli_match=match,
        )
    return incident
