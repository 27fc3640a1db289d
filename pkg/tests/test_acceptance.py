"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside the pytest verdicts.  Every tolerance is pinned here.
"""

import random
import statistics
import time
from fractions import Fraction

import pytest

from stablegons.chambers import (
    EpsilonAssignment,
    LengthVector,
    augment,
    central_base,
    classify,
    relevant_subsets,
)
from stablegons.cohomology import (
    ih_poincare_center,
    poincare_center,
    poincare_wall_crossing,
    stable_betti,
    strata,
)
from stablegons.cone import param_contains, param_dim, param_sample
from stablegons.errors import RangeError
from stablegons.realize import (
    close,
    close_degenerate,
    diagonal,
    is_line_gon,
    moduli_point,
    parallel_classes,
    pgl2_equivalent,
    transport,
)
from stablegons.stable import stabilize, to_stable_curve

F = Fraction


def ok(line):
    print(f"[acceptance] {line}: PASS")


def random_interior(rng, n, lo=8, hi=24, denom=8):
    while True:
        r = LengthVector([F(rng.randint(lo, hi), denom) for _ in range(n)])
        if r.in_cone_interior():
            return r


def random_off_wall(rng, n):
    while True:
        r = random_interior(rng, n)
        rep = classify(r)
        if rep.smooth:
            return r


def test_closed_form_agreement():
    # wall crossing must reproduce the closed forms exactly, quickly
    expected = {5: (1, 5, 1), 7: (1, 7, 22, 7, 1), 9: (1, 9, 37, 93, 37, 9, 1)}
    for n in (5, 7, 9):
        t0 = time.monotonic()
        poly = poincare_wall_crossing([1] * n)
        dt = time.monotonic() - t0
        assert poly.coeffs == expected[n], f"n={n}: {poly.coeffs}"
        assert poly == poincare_center(n)
        assert dt < 10.0, f"n={n} took {dt:.1f}s"
    ok("closed-form agreement at n=5,7,9 (exact, <10s each)")


def test_even_intersection_forms():
    t0 = time.monotonic()
    assert ih_poincare_center(6).coeffs == (1, 6, 6, 1)
    p8 = ih_poincare_center(8)
    dt = time.monotonic() - t0
    assert p8.palindromic()
    assert p8.at_one() % 2 == 0
    assert dt < 1.0
    ok("even-case closed forms: n=6 exact, n=8 palindromic with even value at 1")


def test_stable_betti_values():
    assert stable_betti((1, 1, 1, F(3, 2))).coeffs == (1, 1)
    assert stable_betti([1] * 5).coeffs == (1, 5, 1)
    t8 = None
    for n in (5, 6, 7, 8):
        r = central_base(n)
        t0 = time.monotonic()
        poly = stable_betti(r)
        dt = time.monotonic() - t0
        if n == 8:
            t8 = dt
        want_b2 = 2 ** (n - 1) - (n * n - n + 2) // 2
        assert poly.coefficient(1) == want_b2, f"n={n}"
        assert poly.palindromic()
        assert poly.degree() == n - 3
    assert t8 is not None and t8 < 60.0, f"n=8 took {t8:.1f}s"
    ok("stable Betti numbers: [1,1], [1,5,1], b2 identity n=5..8, palindromic, n=8 <60s")


def test_chamber_independence():
    rng = random.Random(2024)
    for n in (5, 6, 7):
        chambers = [
            LengthVector([1] * (n - 1) + [n - 2]),  # dominant-edge chamber
            central_base(n),
            random_off_wall(rng, n),
            random_off_wall(rng, n),
        ]
        polys = {stable_betti(r).coeffs for r in chambers}
        assert len(polys) == 1, f"n={n}: got {polys}"
    ok("stable Betti numbers identical across 4 chambers at n=5,6,7 (exact)")


def test_epsilon_legality_boundary():
    rng = random.Random(77)
    shrink = 1 - F(1, 10**6)
    tried = 0
    while tried < 50:
        n = rng.randint(4, 9)
        r = random_interior(rng, n)
        rel = relevant_subsets(r, 2)
        if not rel:
            continue
        J = rel[rng.randrange(len(rel))]
        tried += 1
        bound = 2 * min(r.r[j - 1] for j in J)
        inside = augment(r, J, bound * shrink)
        assert inside.n == len(J) + 1
        with pytest.raises(RangeError):
            augment(r, J, bound)
    ok("epsilon legality: open at 2*min (50 random (r, J), exact)")


def test_moment_map_closure():
    rng = random.Random(55)
    per_closure = []
    for n in range(4, 13):
        for _ in range(10):
            r = random_interior(rng, n)
            t0 = time.monotonic()
            for seed in range(100):
                frame = close(r, seed=seed)
                assert frame.residual <= 1e-10
            per_closure.append((time.monotonic() - t0) / 100)
    med = statistics.median(per_closure)
    assert med < 0.050, f"median closure time {1000 * med:.1f} ms"
    ok(
        "moment-map closure: 100 seeds x 10 r x n=4..12 all <=1e-10, "
        f"median {1000 * med:.2f} ms"
    )


def test_transport_round_trip():
    rng = random.Random(4)
    done = 0
    while done < 100:
        n = rng.choice([4, 5])
        r = random_off_wall(rng, n)
        frame = close(r, seed=rng.randrange(10**6))
        # a nearby same-chamber target for the closing length
        last = r.r[-1]
        for _ in range(50):
            target = last * (1 + F(rng.randint(-40, 40), 1000))
            cand = LengthVector(r.r[:-1] + (target,))
            if (
                target > 0
                and cand.in_cone_interior()
                and classify(cand).signature == classify(r).signature
            ):
                break
        else:
            continue
        there = transport(frame, target)
        back = transport(there, last)
        assert pgl2_equivalent(
            moduli_point(frame), moduli_point(back), tol=1e-8
        ), f"round trip drifted (r={r!r})"
        done += 1
    ok("transport round trip preserves moduli within 1e-8 (100 frames, n=4,5)")


def test_window_isolation():
    r = LengthVector((1, 1, 1, 1, 2))
    walls = classify(r).line_gons
    assert len(walls) == 4
    for J in walls:
        rJ = [r.r[j - 1] for j in J]
        upper = float(sum(rJ))
        lower = upper - 2 * float(min(rJ))
        found = 0
        seed = 0
        while found < 200:
            frame = close(r, seed=seed)
            seed += 1
            _, d = diagonal(frame, J)
            if lower + 1e-8 < d < upper - 1e-8:
                found += 1
                assert not is_line_gon(frame, tol=1e-8)
    ok("window isolation: 200 in-window frames per line gon, none collinear")


def test_dominant_edge_never_degenerates():
    r = LengthVector(("1", "1", "1", "1", "3.5"))
    assert classify(r).favorable_index == 5
    for seed in range(200):
        frame = close(r, seed=seed)
        cls = next(c for c in parallel_classes(frame) if 5 in c)
        assert cls == [5]
    ok("dominant edge isolated in 200 random frames")


def test_curve_combinatorics():
    rng = random.Random(31)
    r = LengthVector((1, 1, 1, 2, 2, 2))
    eps = EpsilonAssignment.canonical(r)
    built = 0
    while built < 100:
        labels = list(range(1, 7))
        rng.shuffle(labels)
        k = rng.choice([0, 1, 1, 2])
        classes, used = [], 0
        for _ in range(k):
            size = rng.choice([2, 3])
            if used + size > 5:  # keep at least one loose edge
                break
            classes.append(tuple(sorted(labels[used : used + size])))
            used += size
        try:
            frame = (
                close_degenerate(r, classes, seed=rng.randrange(10**6))
                if classes
                else close(r, seed=rng.randrange(10**6))
            )
        except Exception:
            continue
        sp = stabilize(frame, eps, filler=rng.randrange(10**6))
        curve = to_stable_curve(sp)
        assert curve.is_tree()
        assert all(v.n_special >= 3 for v in curve.vertices)
        built += 1

    entries, _ = strata(("1", "1", "1", "1", "3.5"))
    single = [e for e in entries if e.single_block and e.nonempty_closed]
    points = sum(1 for e in single if e.dim == 0)
    lines = sum(1 for e in single if e.dim == 1)
    assert (points, lines) == (4, 6)
    ok("curve combinatorics: 100 stabilized hexagons stable trees; 4 point / 6 line centers")


def test_cone_dimension_identity():
    for n in range(5, 10):
        for seed in range(200):
            p = param_sample(n, seed=seed)
            assert p.r.n + len(p.eps.eps) == param_dim(n)
            assert param_contains(p)
    ok("cone dimension identity holds on 200 samples at each n=5..9")
