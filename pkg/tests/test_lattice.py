import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enflotype import (
    CapacityError,
    GridFunction,
    InvalidInputError,
    LpSpace,
    SamplingPlan,
    TorusDomain,
    UsageError,
    even_box,
    expect_signs,
    integrate_torus,
    parity_slab,
    random_grid,
    shift,
)
from enflotype.lattice import (
    all_points,
    axis_roll,
    decode_indices,
    enumerate_signs,
    full_roll,
    point_index,
    shifted_indices,
)


def test_domain_validation():
    with pytest.raises(UsageError):
        TorusDomain(0, 4)
    with pytest.raises(UsageError):
        TorusDomain(2, 5)
    assert TorusDomain(3, 4).size == 64


def test_plan_validation():
    with pytest.raises(UsageError):
        SamplingPlan("approximate")
    with pytest.raises(UsageError):
        SamplingPlan.monte_carlo(samples=0, seed=1)
    with pytest.raises(UsageError):
        SamplingPlan("monte_carlo", samples=4)
    assert SamplingPlan.exhaustive().is_exhaustive


def test_shift_wraparound():
    dom = TorusDomain(1, 4)
    np.testing.assert_array_equal(shift(dom, [3], [1]), [0])


def test_shift_identity():
    dom = TorusDomain(3, 6)
    np.testing.assert_array_equal(shift(dom, [1, 5, 2], [0, 0, 0]), [1, 5, 2])


def test_shift_half_period():
    dom = TorusDomain(2, 8)
    np.testing.assert_array_equal(shift(dom, [1, 2], [4, 4]), [5, 6])


def test_shift_length_mismatch():
    with pytest.raises(UsageError):
        shift(TorusDomain(2, 4), [0, 0], [1])


@given(
    x=st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=3),
    a=st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=3),
    b=st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=3),
)
@settings(max_examples=60, deadline=None)
def test_shift_is_a_group_action(x, a, b):
    dom = TorusDomain(3, 6)
    one_step = shift(dom, shift(dom, x, a), b)
    combined = shift(dom, x, np.add(a, b))
    np.testing.assert_array_equal(one_step, combined)


def test_even_box_singleton():
    assert even_box(1, 2) == [(0, 0)]


def test_even_box_line():
    assert even_box(3, 1) == [(-2,), (0,), (2,)]


def test_even_box_square_count():
    assert len(even_box(3, 2)) == 9


def test_even_box_rejects_even_k():
    with pytest.raises(UsageError):
        even_box(2, 1)


def test_parity_slab_trivial_axis():
    assert parity_slab(1, 1, 1) == [(0,)]


def test_parity_slab_plane():
    assert parity_slab(1, 1, 2) == [(0, -1), (0, 1)]


def test_parity_slab_window_three():
    got = parity_slab(1, 3, 2)
    assert len(got) == 12
    assert set(got) == {(e, o) for e in (-2, 0, 2) for o in (-3, -1, 1, 3)}


def test_parity_slab_rejects_bad_axis():
    with pytest.raises(UsageError):
        parity_slab(3, 1, 2)


@pytest.mark.parametrize("k", [1, 3, 5, 7, 9])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_structured_set_cardinalities(k, n):
    assert len(even_box(k, n)) == k**n
    for j in range(1, n + 1):
        got = parity_slab(j, k, n)
        assert len(got) == k * (k + 1) ** (n - 1)
        for off in got:
            assert off[j - 1] % 2 == 0
            assert all(off[ax] % 2 == 1 for ax in range(n) if ax != j - 1)
            assert all(abs(c) <= k for c in off)


def test_even_box_entries_are_even_and_inside():
    for off in even_box(5, 3):
        assert all(c % 2 == 0 and abs(c) < 5 for c in off)


# expectation / integration -------------------------------------------------


def test_expect_signs_single_coordinate_is_centered():
    mean, se = expect_signs(3, SamplingPlan.exhaustive(), lambda e: e[0])
    assert (mean, se) == (0.0, 0.0)


def test_expect_signs_product_is_centered():
    mean, se = expect_signs(2, SamplingPlan.exhaustive(), lambda e: e[0] * e[1])
    assert (mean, se) == (0.0, 0.0)


def test_expect_signs_constant_under_mc():
    plan = SamplingPlan.monte_carlo(samples=64, seed=7)
    mean, se = expect_signs(4, plan, lambda e: 1.0)
    assert (mean, se) == (1.0, 0.0)


def test_expect_signs_capacity():
    with pytest.raises(CapacityError):
        expect_signs(8, SamplingPlan.exhaustive(cap=100), lambda e: 1.0)


def test_integrate_mean_of_coordinate():
    mean, se = integrate_torus(TorusDomain(1, 4), SamplingPlan.exhaustive(), lambda x: x[0])
    assert (mean, se) == (1.5, 0.0)


def test_integrate_constant():
    mean, _ = integrate_torus(TorusDomain(2, 4), SamplingPlan.exhaustive(), lambda x: -2.25)
    assert mean == -2.25


def test_integrate_point_indicator():
    dom = TorusDomain(2, 8)
    mean, _ = integrate_torus(
        dom, SamplingPlan.exhaustive(), lambda x: 1.0 if x[0] == 0 and x[1] == 0 else 0.0
    )
    assert mean == 1.0 / 64.0


def test_integrate_capacity():
    with pytest.raises(CapacityError):
        integrate_torus(TorusDomain(4, 8), SamplingPlan.exhaustive(cap=1000), lambda x: 1.0)


def test_mc_is_bit_deterministic():
    plan = SamplingPlan.monte_carlo(samples=512, seed=123456789)
    dom = TorusDomain(2, 8)
    first = integrate_torus(dom, plan, lambda x: float(x[0] * x[1]))
    second = integrate_torus(dom, plan, lambda x: float(x[0] * x[1]))
    assert first == second
    s1 = expect_signs(5, plan, lambda e: float(np.prod(e)))
    s2 = expect_signs(5, plan, lambda e: float(np.prod(e)))
    assert s1 == s2


def test_mc_agrees_with_exhaustive_within_error_bars():
    dom = TorusDomain(2, 6)
    exact, _ = integrate_torus(dom, SamplingPlan.exhaustive(), lambda x: float((x[0] - x[1]) ** 2))
    hits = 0
    trials = 120
    for seed in range(trials):
        plan = SamplingPlan.monte_carlo(samples=400, seed=seed)
        mean, se = integrate_torus(dom, plan, lambda x: float((x[0] - x[1]) ** 2))
        if abs(mean - exact) <= 4.0 * se:
            hits += 1
    assert hits / trials >= 0.99


# enumeration order ----------------------------------------------------------


def test_enumerate_signs_canonical_order():
    rows = enumerate_signs(2)
    np.testing.assert_array_equal(rows, [[-1, -1], [-1, 1], [1, -1], [1, 1]])
    # antipode of row i is row 2^n - 1 - i
    np.testing.assert_array_equal(rows[::-1], -rows)


def test_all_points_row_major():
    pts = all_points(TorusDomain(2, 2))
    np.testing.assert_array_equal(pts, [[0, 0], [0, 1], [1, 0], [1, 1]])


def test_point_index_roundtrip(rng):
    dom = TorusDomain(3, 6)
    for _ in range(20):
        coords = rng.integers(0, 6, size=3)
        idx = point_index(dom, coords)
        np.testing.assert_array_equal(decode_indices(dom, [idx])[0], coords)


def test_shifted_indices_match_pointwise_shift(rng):
    dom = TorusDomain(2, 6)
    idx = np.arange(dom.size)
    offset = np.array([2, -3])
    got = shifted_indices(dom, idx, offset)
    want = [point_index(dom, shift(dom, pt, offset)) for pt in all_points(dom)]
    np.testing.assert_array_equal(got, want)


def test_axis_roll_matches_shifted_indices(rng):
    dom = TorusDomain(2, 4)
    vals = rng.standard_normal((dom.size, 3))
    rolled = axis_roll(vals, dom, axis=1, delta=3)
    want = vals[shifted_indices(dom, np.arange(dom.size), [0, 3])]
    np.testing.assert_array_equal(rolled, want)


def test_full_roll_matches_shifted_indices(rng):
    dom = TorusDomain(3, 4)
    vals = rng.standard_normal((dom.size, 2))
    rolled = full_roll(vals, dom, [1, 2, 3])
    want = vals[shifted_indices(dom, np.arange(dom.size), [1, 2, 3])]
    np.testing.assert_array_equal(rolled, want)


# grid functions -------------------------------------------------------------


def test_grid_function_shape_validation():
    dom = TorusDomain(1, 4)
    space = LpSpace(2, 2.0)
    with pytest.raises(UsageError):
        GridFunction(dom, space, np.zeros((4, 3)))
    with pytest.raises(InvalidInputError):
        GridFunction(dom, space, np.full((4, 2), np.nan))


def test_grid_function_values_are_frozen():
    dom = TorusDomain(1, 4)
    g = GridFunction(dom, LpSpace(1, 2.0), np.zeros((4, 1)))
    with pytest.raises(ValueError):
        g.values[0, 0] = 1.0


def test_grid_function_from_callable_and_value_at():
    dom = TorusDomain(2, 4)
    g = GridFunction.from_callable(dom, LpSpace(1, 2.0), lambda x: [float(x[0] * 10 + x[1])])
    assert g.value_at([3, 2])[0] == 32.0
    assert g.value_at([3 + 4, 2 - 4])[0] == 32.0


def test_random_grid_reproducible():
    dom = TorusDomain(2, 4)
    space = LpSpace(2, 2.0)
    a = random_grid(dom, space, np.random.Generator(np.random.Philox(5)))
    b = random_grid(dom, space, np.random.Generator(np.random.Philox(5)))
    np.testing.assert_array_equal(a.values, b.values)
