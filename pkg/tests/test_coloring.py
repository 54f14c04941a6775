import math
from itertools import permutations, product

import pytest

from legicolor import coloring as col
from legicolor.errors import InfeasibleError
from legicolor.plane import ProjectivePlane
from legicolor.rng import SplitMix64

from conftest import plane_of_order
from oracles import exhaustive_bad_pairs, recount_caps


def coloring_on_line(plane, line_id, line_colors, d):
    colors = [None] * plane.n_points
    for p, c in zip(plane.lines[line_id], line_colors):
        colors[p] = c
    return col.PartialColoring(d, colors)


# -- line types ---------------------------------------------------------

def test_line_type_counts(fano):
    c = coloring_on_line(fano, 0, (1, 1, 2), 3)
    assert col.line_type(fano, c, 0) == (2, 1, 0)


def test_line_type_ignores_uncolored(fano):
    c = coloring_on_line(fano, 0, (1, 1, None), 3)
    assert col.line_type(fano, c, 0) == (2, 0, 0)


def test_line_type_all_uncolored(fano):
    c = col.PartialColoring.blank(3, fano.n_points)
    assert col.line_type(fano, c, 0) == (0, 0, 0)


def test_line_type_sum_plus_holes_is_line_size(pg3):
    rng = SplitMix64(5)
    reserve = col.sample_reserve(pg3, rng)
    partial = col.sample_partial(pg3, reserve, 4, rng)
    for li, line in enumerate(pg3.lines):
        t = col.line_type(pg3, partial, li)
        holes = sum(1 for p in line if partial.colors[p] is None)
        assert sum(t) + holes == pg3.order + 1


def test_l1_distance():
    assert col.l1_distance((2, 1, 0), (0, 1, 2)) == 4
    assert col.l1_distance((3, 0), (3, 0)) == 0
    assert col.l1_distance((3, 0), (0, 3)) == 6
    with pytest.raises(ValueError):
        col.l1_distance((1, 2), (1, 2, 3))


# -- bad pairs ------------------------------------------------------------

def test_monochrome_coloring_all_pairs_bad(fano):
    c = col.PartialColoring(1, [1] * 7)
    assert len(col.find_bad_pairs(fano, c)) == 21


def test_rainbow_coloring_legitimate(fano):
    c = col.PartialColoring(7, [p + 1 for p in range(7)])
    assert col.find_bad_pairs(fano, c) == []


def test_bad_pairs_requires_total(fano):
    c = col.PartialColoring.blank(2, 7)
    with pytest.raises(ValueError):
        col.find_bad_pairs(fano, c)


def test_bad_pairs_matches_exhaustive_scan(fano):
    from legicolor.solver import solve_full
    result = solve_full(fano, 4, seed=123, max_steps=10 ** 6)
    assert result.succeeded
    assert col.find_bad_pairs(fano, result.coloring) == []
    assert exhaustive_bad_pairs(fano, result.coloring) == []
    # and on a coloring with collisions the two routes agree exactly
    clash = col.PartialColoring(2, [1 + (p % 2) for p in range(7)])
    assert col.find_bad_pairs(fano, clash) == exhaustive_bad_pairs(fano, clash)


def test_bad_pairs_invariant_under_color_relabeling(pg3):
    rng = SplitMix64(17)
    base = col.sample_partial(pg3, None, 3, rng)
    reference = set(col.find_bad_pairs(pg3, base))
    for perm in permutations((1, 2, 3)):
        relabeled = col.PartialColoring(3, [perm[c - 1] for c in base.colors])
        assert set(col.find_bad_pairs(pg3, relabeled)) == reference


# -- dangerous pairs -------------------------------------------------------

def test_small_orders_make_every_pair_dangerous(pg9):
    # 22 ln 9 exceeds the largest possible type distance 2(n+1)
    assert col.danger_threshold(9) > 2 * (9 + 1)
    rng = SplitMix64(3)
    reserve = col.sample_reserve(pg9, rng, inclusion_prob=0.5)
    partial = col.sample_partial(pg9, reserve, 8, rng)
    pairs = col.find_dangerous_pairs(pg9, partial)
    assert len(pairs) == 91 * 90 // 2  # 4095


def test_equal_types_always_dangerous(fano):
    c = col.PartialColoring(2, [1] * 7)
    pairs = col.find_dangerous_pairs(fano, c)
    assert len(pairs) == 21  # distance 0 everywhere


def test_threshold_override_excludes_far_pairs(fano):
    # two monochrome classes with distance 6 between some types; radius 1.5
    # keeps only the equal-type pairs (the real 22 ln n radius never drops
    # below 2(n+1) on actual plane orders)
    c = col.PartialColoring(2, [1, 1, 1, 2, 2, 2, 2])
    pairs = col.find_dangerous_pairs(fano, c, threshold=1.5)
    types = [col.line_type(fano, c, li) for li in range(7)]
    for i, j in pairs:
        assert types[i] == types[j]
    assert any(col.l1_distance(types[i], types[j]) > 1.5
               for i in range(7) for j in range(i + 1, 7)
               if (i, j) not in pairs)


def test_bad_pairs_subset_of_dangerous(pg3):
    rng = SplitMix64(29)
    c = col.sample_partial(pg3, None, 3, rng)
    assert set(col.find_bad_pairs(pg3, c)) <= set(col.find_dangerous_pairs(pg3, c))


def exhaustive_extension_never_bad(plane, partial, i, j, d):
    """Enumerate every completion of the two lines' holes; True when the pair
    never reaches equal types."""
    holes = sorted({p for p in plane.lines[i] + plane.lines[j]
                    if partial.colors[p] is None})
    for combo in product(range(1, d + 1), repeat=len(holes)):
        trial = partial.copy()
        for p, c in zip(holes, combo):
            trial.colors[p] = c
        if col.line_type(plane, trial, i) == col.line_type(plane, trial, j):
            return False
    return True


@pytest.mark.parametrize("q,d,seed", [(2, 2, 1), (2, 3, 1), (3, 2, 1), (3, 3, 4)])
def test_far_pairs_cannot_become_bad(q, d, seed):
    # sharp movement bound: each newly colored point moves each line's type
    # by one, so a pair at distance above (holes_i + holes_j) stays unequal
    # under every extension; 22 ln n only relaxes this via the reserve cap
    plane = plane_of_order(q)
    rng = SplitMix64(seed)
    colors = [None if rng.uniform() < 0.4 else 1 + rng.randbelow(d)
              for _ in range(plane.n_points)]
    partial = col.PartialColoring(d, colors)
    types = [col.line_type(plane, partial, li) for li in range(plane.n_lines)]
    holes = [sum(1 for p in line if partial.colors[p] is None)
             for line in plane.lines]
    checked = 0
    for i in range(plane.n_lines):
        for j in range(i + 1, plane.n_lines):
            if col.l1_distance(types[i], types[j]) > holes[i] + holes[j]:
                assert exhaustive_extension_never_bad(plane, partial, i, j, d)
                checked += 1
    assert checked > 0


def test_real_threshold_never_excludes_reachable_pairs(fano):
    # with the 22 ln n radius on small planes there are no non-dangerous
    # pairs at all, so extension events can never miss a reachable bad pair
    rng = SplitMix64(8)
    reserve = col.sample_reserve(fano, rng)
    partial = col.sample_partial(fano, reserve, 3, rng)
    dangerous = set(col.find_dangerous_pairs(fano, partial))
    assert len(dangerous) == 21


# -- degree caps ------------------------------------------------------------

def test_caps_fail_for_monochrome_outside_reserve(pg9):
    rng = SplitMix64(41)
    reserve = col.sample_reserve(pg9, rng, inclusion_prob=0.4)
    colors = [None if p in reserve.members else 1 for p in range(pg9.n_points)]
    partial = col.PartialColoring(8, colors)
    report = col.check_degree_caps(pg9, partial, reserve, a=1, b=5)
    assert not report.passed
    assert report.max_pair_degree > 1


def test_caps_pass_when_no_pair_is_dangerous(fano):
    rng = SplitMix64(42)
    reserve = col.sample_reserve(fano, rng)
    partial = col.sample_partial(fano, reserve, 3, rng)
    report = col.check_degree_caps(fano, partial, reserve, a=1, b=4, threshold=-1.0)
    assert report.passed
    assert report.dangerous_pairs == 0
    assert report.max_events_per_point == 0


def test_caps_report_matches_recount(pg9):
    rng = SplitMix64(77)
    reserve = col.sample_reserve(pg9, rng, inclusion_prob=0.5)
    partial = col.sample_partial(pg9, reserve, 8, rng)
    report = col.check_degree_caps(pg9, partial, reserve, a=2, b=5)
    max_line, max_involved, max_events = recount_caps(
        pg9, partial, sorted(reserve.members), col.danger_threshold(9))
    assert report.max_pair_degree == max_line
    assert report.max_involved_lines == max_involved
    assert report.max_events_per_point == max_events
    assert report.passed == (max_line <= 2 and max_involved <= 5)


def test_caps_rejects_mismatched_reserve(fano):
    rng = SplitMix64(1)
    reserve = col.sample_reserve(fano, rng)
    total = col.sample_partial(fano, None, 3, rng)
    with pytest.raises(ValueError):
        col.check_degree_caps(fano, total, reserve, 1, 4)


# -- sampling ----------------------------------------------------------------

def test_all_points_is_a_valid_fano_reserve(fano):
    r = col.ReserveSet.from_members(fano, range(7))
    assert math.log(2) <= 3 <= 11 * math.log(2)
    assert r.per_line == (3,) * 7
    assert not r.within_size_cap or r.size_cap >= 7


def test_reserve_window_enforced_at_construction(pg3):
    with pytest.raises(ValueError):
        col.ReserveSet.from_members(pg3, [])  # every line count 0 < ln 3


def test_sample_reserve_succeeds_on_pg9(pg9):
    reserve = col.sample_reserve(pg9, SplitMix64(9), inclusion_prob=0.5)
    lo, hi = math.log(9), 11 * math.log(9)
    assert all(lo <= c <= hi for c in reserve.per_line)


def test_size_cap_is_vacuous_at_small_orders(pg9):
    # (n^2+n+1) * 11 ln n / (n+1) = 91 * 11 * ln 9 / 10, above the point count
    reserve = col.sample_reserve(pg9, SplitMix64(9), inclusion_prob=0.5)
    assert reserve.size_cap == pytest.approx(91 * 11 * math.log(9) / 10, rel=1e-12)
    assert reserve.size_cap > pg9.n_points
    assert reserve.within_size_cap


def test_sample_reserve_rejects_zero_probability(fano):
    with pytest.raises(InfeasibleError):
        col.sample_reserve(fano, SplitMix64(1), inclusion_prob=0.0)


def test_sample_reserve_rejects_order_one():
    triangle = ProjectivePlane(1, ["a", "b", "c"], [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(ValueError):
        col.sample_reserve(triangle, SplitMix64(1))


def test_sample_reserve_exhausts_attempts(pg9):
    # near-empty samples leave lines below the ln(9) floor every attempt
    with pytest.raises(InfeasibleError):
        col.sample_reserve(pg9, SplitMix64(2), inclusion_prob=0.01, max_attempts=5)


def test_sampling_is_deterministic(pg3):
    a = col.sample_partial(pg3, None, 5, SplitMix64(99))
    b = col.sample_partial(pg3, None, 5, SplitMix64(99))
    assert a == b
    ra = col.sample_reserve(pg3, SplitMix64(7))
    rb = col.sample_reserve(pg3, SplitMix64(7))
    assert ra.members == rb.members


def test_sample_partial_respects_reserve(fano):
    rng = SplitMix64(3)
    reserve = col.ReserveSet.from_members(fano, range(7))
    partial = col.sample_partial(fano, reserve, 4, rng)
    assert partial.uncolored == frozenset(range(7))
    total = col.sample_partial(fano, None, 4, SplitMix64(3))
    assert total.is_total
    assert all(1 <= c <= 4 for c in total.colors)


def test_coloring_json_round_trip(tmp_path, fano):
    partial = col.PartialColoring(3, [1, None, 2, None, 3, 1, 2])
    path = tmp_path / "c.json"
    col.save_coloring(partial, path)
    assert col.load_coloring(path) == partial
    reserve = col.ReserveSet.from_members(fano, range(7))
    rpath = tmp_path / "s.json"
    col.save_reserve(reserve, rpath)
    assert col.load_reserve(fano, rpath).members == reserve.members
