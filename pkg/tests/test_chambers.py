import itertools
import random
from fractions import Fraction

import pytest

from stablegons.chambers import (
    EpsilonAssignment,
    LengthVector,
    WallIndex,
    augment,
    canonical_epsilon,
    central_base,
    classify,
    epsilon_range,
    favorable_index,
    is_favorable,
    line_gons,
    relevant_subsets,
    same_chamber,
    wall_margin,
)
from stablegons.errors import InvalidArgument, RangeError

F = Fraction


def brute_relevant(r, min_size):
    """Independent enumeration oracle: light sides of walls by raw sums."""
    n = len(r)
    total = sum(r)
    out = []
    for k in range(min_size, n - 1):
        for J in itertools.combinations(range(1, n + 1), k):
            if 2 * sum(r[j - 1] for j in J) <= total:
                out.append(J)
    return sorted(out)


def random_interior(rng, n, denom=16):
    while True:
        r = [F(rng.randint(denom, 3 * denom), denom) for _ in range(n)]
        lv = LengthVector(r)
        if lv.in_cone_interior():
            return lv


def test_wall_margin_examples():
    assert wall_margin((1, 1, 1, 1, 1), (1, 2)) == -1
    assert wall_margin(("1", "1", "1", "1", "2"), (1, 2, 3)) == 0
    assert wall_margin(("1", "1", "1", "1", "3.5"), (4, 5)) == F(3, 2)


def test_wall_margin_rejects_empty_and_full():
    with pytest.raises(InvalidArgument):
        wall_margin((1, 1, 1), ())
    with pytest.raises(InvalidArgument):
        wall_margin((1, 1, 1), (1, 2, 3))


def test_complement_antisymmetry():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(4, 8)
        r = random_interior(rng, n)
        k = rng.randint(1, n - 1)
        J = tuple(rng.sample(range(1, n + 1), k))
        Jc = tuple(i for i in range(1, n + 1) if i not in J)
        assert wall_margin(r, J) == -wall_margin(r, Jc)


def test_wall_index_canonical_form():
    w = WallIndex((4, 5), 5)
    assert w.J == (1, 2, 3)
    assert WallIndex((1, 2, 3), 5) == w
    with pytest.raises(InvalidArgument):
        WallIndex((1,), 5)


def test_classify_dominant_edge():
    rep = classify(("1", "1", "1", "1", "3.5"))
    assert rep.favorable_index == 5
    assert rep.smooth
    assert not rep.central
    assert rep.in_cone_interior


def test_classify_equilateral_pentagon():
    rep = classify((1, 1, 1, 1, 1))
    assert rep.central
    assert rep.smooth
    assert rep.favorable_index is None


def test_classify_on_wall():
    rep = classify((1, 1, 1, 1, 2))
    assert rep.line_gons == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    assert not rep.smooth


def test_classify_rejects_nonpositive():
    with pytest.raises(InvalidArgument):
        classify((1, 0, 1))


def test_classify_outside_cone_is_flagged_not_error():
    rep = classify((1, 1, 3))
    assert not rep.in_cone_interior


def test_scale_invariance():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(4, 7)
        r = random_interior(rng, n)
        lam = F(rng.randint(1, 9), rng.randint(1, 9))
        a, b = classify(r), classify(r.scaled(lam))
        assert a.signature == b.signature
        assert a.favorable_index == b.favorable_index
        assert a.central == b.central
        assert same_chamber(r, r.scaled(lam))


def test_relevant_subsets_against_oracle():
    for r, min_size in [
        (LengthVector([1] * 7), 3),
        (LengthVector([1] * 5), 3),
        (LengthVector([1] * 5), 2),
        (LengthVector(["1", "1", "1", "1", "3.5"]), 2),
    ]:
        assert relevant_subsets(r, min_size) == brute_relevant(r.r, min_size)
    assert len(relevant_subsets(LengthVector([1] * 7), 3)) == 35
    assert relevant_subsets(LengthVector([1] * 5), 3) == []
    assert len(relevant_subsets(LengthVector([1] * 5), 2)) == 10


def test_relevant_subsets_flags_wall_equalities():
    # on a wall both sides are (non-strictly) relevant, so each of the four
    # line-gon walls shows up twice: as a pair with edge 5 and as its
    # complementary triple
    flagged = relevant_subsets((1, 1, 1, 1, 2), 2, with_margins=True)
    zeros = [J for J, m in flagged if m == 0]
    assert zeros == sorted(
        [(1, 5), (2, 5), (3, 5), (4, 5), (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    )


def test_favorable_implies_strictly_longest():
    rng = random.Random(11)
    seen = 0
    for _ in range(200):
        n = rng.randint(4, 8)
        r = random_interior(rng, n)
        idx = favorable_index(r)
        if idx is not None:
            seen += 1
            assert all(r.r[idx - 1] > x for j, x in enumerate(r.r, 1) if j != idx)
        # uniqueness: at most one index passes for n >= 4
        hits = [i for i in range(1, n + 1) if is_favorable(r, i)]
        assert len(hits) <= 1
    # the sweep must actually exercise some favorable vectors
    assert favorable_index((1, 1, 1, 1, F(7, 2))) == 5


def test_epsilon_range_examples():
    lo, hi = epsilon_range(LengthVector([1] * 6), (1, 2, 3))
    assert (lo, hi) == (0, 2)
    assert canonical_epsilon(LengthVector([1] * 6)) == 1
    assert epsilon_range((2, 3, 5, 5, 5), (1, 2))[1] == 4
    with pytest.raises(InvalidArgument):
        epsilon_range(("1", "1", "1", "1", "3.5"), (1, 5))


def test_augment_examples():
    out = augment(LengthVector([1] * 6), (1, 2, 3), 1)
    assert out.r == (1, 1, 1, 2)
    assert favorable_index(out) == 4
    with pytest.raises(RangeError):
        augment(LengthVector([1] * 6), (1, 2, 3), 2)
    tri = augment(LengthVector([1] * 5), (1, 2), 1)
    assert tri.r == (1, 1, 1)
    assert is_favorable(tri, 3)


def test_augment_closure_property():
    rng = random.Random(23)
    for _ in range(60):
        n = rng.randint(4, 8)
        r = random_interior(rng, n)
        rel = relevant_subsets(r, 2)
        if not rel:
            continue
        J = rel[rng.randrange(len(rel))]
        lo, hi = epsilon_range(r, J)
        eps = hi * F(rng.randint(1, 31), 32)
        out = augment(r, J, eps)
        assert is_favorable(out, out.n)


def test_central_chamber_count_identity():
    # |relevant subsets of size > 2| at the center must be
    # 2^(n-1) - 1 - n - n(n-1)/2.
    for n in range(5, 10):
        base = central_base(n)
        want = 2 ** (n - 1) - 1 - n - n * (n - 1) // 2
        assert len(relevant_subsets(base, 3)) == want


def test_central_base_is_off_all_walls():
    for n in range(4, 11):
        assert classify(central_base(n)).smooth


def test_line_gons_none_for_generic():
    assert line_gons((1, 1, 1, 1, F(7, 2))) == []


def test_nabla_index_quadrilateral():
    # all pairs avoiding edge 4 are heavy: the product-of-lines chamber
    from stablegons.chambers import nabla_index

    assert nabla_index((3, 3, 3, 1)) == 4
    assert nabla_index((1, 1, 1, F(3, 2))) is None
    # the pair condition is unsatisfiable once n >= 5
    assert nabla_index((3, 3, 3, 3, 1)) is None


def test_epsilon_assignment_lookup_and_canonical():
    r = LengthVector([2, 3, 5, 5, 5])
    ea = EpsilonAssignment({(1, 2): F(1, 2)})
    assert ea.get((2, 1)) == F(1, 2)
    with pytest.raises(InvalidArgument):
        ea.get((3, 4))
    can = EpsilonAssignment.canonical(r)
    assert can.get((3, 4, 5)) == 2
    assert can.legal_for(r)


def test_classify_json_fields():
    rep = classify(("1", "1", "1", "1", "3.5")).to_json()
    assert set(rep) == {
        "in_cone_interior",
        "signature",
        "walls_on",
        "line_gons",
        "smooth",
        "favorable_index",
        "nabla_index",
        "central",
    }
    assert rep["favorable_index"] == 5
