import numpy as np
import pytest
from hypothesis import given, strategies as st

from stratopt.poly import cusp_curve, double_cone, parse_polynomial
from stratopt.resolve import (UNDEFINED, NoSamplesError, OffLevelSetError,
                              ResolutionError, choose_resolution,
                              count_components, deform, default_region,
                              project_to_level, projected_gradient_field,
                              proximity_check, smoothness_check)
from stratopt.stratify import Region

CONE = double_cone()
CUSP = cusp_curve()


# -- deform / count_components -------------------------------------------------

def test_two_sheet_deformation():
    assert count_components(deform(CONE, -0.1), 64).count == 2


def test_one_sheet_deformation():
    assert count_components(deform(CONE, +0.1), 64).count == 1


def test_double_cone_connected_through_apex():
    assert count_components(deform(CONE, 0.0), 64).count == 1


def test_counts_stable_under_grid_refinement():
    for c in (-0.1, 0.1, -0.05, 0.05):
        c64 = count_components(deform(CONE, c), 64).count
        c128 = count_components(deform(CONE, c), 128).count
        assert c64 == c128


def test_cusp_deformation_smooth_curve():
    d = deform(CUSP, 0.2)
    assert count_components(d, 64).count == 1
    assert smoothness_check(d)


def test_component_report_invariants():
    rep = count_components(deform(CONE, 0.1), 64)
    assert 0 <= rep.count <= rep.occupied_cells
    assert rep.grid_spacing == pytest.approx(4.0 / 64)


def test_empty_level_set_counts_zero():
    sq = parse_polynomial("x0^2 + x1^2", nvars=2)
    assert count_components(deform(sq, -0.5), 32).count == 0


def test_grid_n_validated():
    with pytest.raises(ValueError):
        count_components(deform(CONE, 0.1), 8)


# -- choose_resolution -----------------------------------------------------------

def test_cone_resolution_prefers_connected_sign():
    chosen = choose_resolution(CONE, 0.1)
    assert chosen.level == +0.1
    assert smoothness_check(chosen)


def test_cusp_resolution_tie_breaks_positive():
    # both signs are connected curves in the box, so +eps wins the tie
    assert count_components(deform(CUSP, +0.1), 64).count == 1
    assert count_components(deform(CUSP, -0.1), 64).count == 1
    assert choose_resolution(CUSP, 0.1).level == +0.1


def test_square_poly_empty_negative_level():
    # x0^2 has an empty negative level set; +eps is the only viable candidate
    sq = parse_polynomial("x0^2", nvars=1)
    region = Region.cube(-2.0, 2.0, 1)
    assert count_components(deform(sq, -0.25, region), 32).count == 0
    chosen = choose_resolution(sq, 0.25, region, grid_n=32)
    assert chosen.level == +0.25


def test_both_levels_empty_is_an_error():
    # x0^2 + 10 never comes within +/-1 of zero on the region
    p = parse_polynomial("x0^2 + 10", nvars=1)
    region = Region.cube(-2.0, 2.0, 1)
    with pytest.raises(ResolutionError):
        choose_resolution(p, 1.0, region, grid_n=32)


# -- smoothness_check --------------------------------------------------------------

def test_deformed_cone_is_smooth():
    assert smoothness_check(deform(CONE, 0.1), samples=2000, seed=1)


def test_singular_cone_fails_smoothness():
    assert not smoothness_check(deform(CONE, 0.0), samples=2000, seed=1)


def test_smoothness_sample_floor():
    with pytest.raises(ValueError):
        smoothness_check(deform(CONE, 0.1), samples=50)


# -- proximity_check -----------------------------------------------------------------

def test_proximity_small_deformation_near_base():
    # analytic bound away from the apex: |sqrt(xi^2+c) - |xi|| <= c / (2|xi|)
    md = proximity_check(deform(CONE, 0.01), exclusion_radius=0.5, samples=4000, seed=3)
    assert md < 0.02


def test_proximity_identity_at_zero_level():
    md = proximity_check(deform(CONE, 0.0), exclusion_radius=0.5, samples=2000, seed=3)
    assert md < 1e-9


def test_proximity_no_samples_when_exclusion_covers_region():
    # ambient points of the c=0.01 deformation inside [-2,2]^3 stay within
    # norm sqrt(2*4+0.01) < 2.84, so a radius-4 exclusion swallows them all
    with pytest.raises(NoSamplesError):
        proximity_check(deform(CONE, 0.01), exclusion_radius=4.0, samples=2000, seed=3)


def test_proximity_shrinks_with_level():
    near = proximity_check(deform(CONE, 0.001), exclusion_radius=0.5, samples=3000, seed=7)
    far = proximity_check(deform(CONE, 0.1), exclusion_radius=0.5, samples=3000, seed=7)
    assert near < far


def test_proximity_requires_positive_radius():
    with pytest.raises(ValueError):
        proximity_check(deform(CONE, 0.1), exclusion_radius=0.0)


# -- projected_gradient_field -----------------------------------------------------------

def arclength_tangential_derivative(level, t, xbar, h=1e-6):
    """Oracle: derivative of the loss along the cusp branch (t^3-ish param).

    The branch of {x0^2 + x1^3 = level} through (sqrt(level - t^3), t) is
    parameterized by t; differencing the loss along it gives the tangential
    gradient magnitude independently of the projection formula.
    """
    def point(u):
        return np.array([np.sqrt(level - u ** 3), u])

    def loss(u):
        d = point(u) - xbar
        return 0.5 * d @ d

    dldt = (loss(t + h) - loss(t - h)) / (2 * h)
    dpdt = (point(t + h) - point(t - h)) / (2 * h)
    return dldt / np.linalg.norm(dpdt)


def test_field_matches_direct_formula_and_arclength_oracle():
    pt = np.array([1.0, -1.0])
    g = np.array([1.0, 0.0])
    [proj] = projected_gradient_field(CUSP, 0.0, lambda x: g, [pt])
    expected = np.array([9.0 / 13.0, -6.0 / 13.0])  # g minus its normal part
    assert np.allclose(proj, expected, atol=1e-12)
    assert np.linalg.norm(proj) > 0
    # cross-check the magnitude against the arclength parameterization
    xbar = pt - g  # so that the ambient loss gradient at pt equals g
    oracle_mag = abs(arclength_tangential_derivative(0.0, -1.0, xbar))
    assert np.linalg.norm(proj) == pytest.approx(oracle_mag, rel=1e-5)


def test_field_undefined_at_singularity():
    [proj] = projected_gradient_field(CUSP, 0.0, lambda x: np.array([1.0, 0.0]),
                                      [np.array([0.0, 0.0])])
    assert proj is UNDEFINED


def test_field_zero_when_gradient_is_normal():
    pt = np.array([1.0, -1.0])
    n = CUSP.grad(pt)
    [proj] = projected_gradient_field(CUSP, 0.0, lambda x: 3.0 * n, [pt])
    assert np.linalg.norm(proj) < 1e-12


def test_field_rejects_off_level_points():
    with pytest.raises(OffLevelSetError):
        projected_gradient_field(CUSP, 0.0, lambda x: x, [np.array([1.0, 1.0])])


def test_field_dimension_guard():
    p4 = parse_polynomial("x0^2 + x1^2 + x2^2 + x3^2", nvars=4)
    with pytest.raises(ValueError):
        projected_gradient_field(p4, 1.0, lambda x: x, [np.zeros(4)])


@given(st.integers(0, 2 ** 31 - 1))
def test_field_orthogonal_to_normal(seed):
    rng = np.random.default_rng(seed)
    t = rng.uniform(-1.4, -0.1)
    pt = np.array([np.sqrt(-t ** 3), t])  # on the cusp curve
    g = rng.normal(size=2)
    [proj] = projected_gradient_field(CUSP, 0.0, lambda x: g, [pt])
    assert abs(proj @ CUSP.grad(pt)) < 1e-10 * max(1.0, np.linalg.norm(CUSP.grad(pt)))


# -- projection helper ---------------------------------------------------------------

def test_project_to_level_lands_on_level():
    rng = np.random.default_rng(0)
    X = default_region(3).sample(500, rng)
    Y, ok = project_to_level(CONE, 0.1, X)
    assert ok.mean() > 0.99
    assert np.abs(CONE.eval_many(Y[ok]) - 0.1).max() <= 1e-12
