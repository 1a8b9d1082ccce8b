import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcv import analysis as an
from pmcv import catalog, geometry as geo, jets
from pmcv.errors import DegenerateMetricError, DimensionError, DomainError


def test_space_form_signatures():
    dS = geo.SpaceForm(5, 1, 1.0)
    assert dS.ambient_signature.index == 1 and dS.ambient_signature.dim == 6
    assert dS.n == 4 and dS.label == "S^5_1(1)"
    adS = geo.SpaceForm(5, 1, -1.0)
    assert adS.ambient_signature.index == 2
    assert list(adS.signs) == [-1, -1, 1, 1, 1, 1]
    with pytest.raises(ValueError):
        geo.SpaceForm(3, 0, 0.0)


@pytest.mark.parametrize("key", ["4.1", "4.2", "4.3", "4.4", "umbilical", "product"])
def test_catalog_satisfies_gauss_codazzi_and_quadric(instances, key):
    imm = instances[key]
    pts = an.chart_grid(imm, 3)
    gc = geo.gauss_codazzi_residuals(imm, pts)
    assert gc.gauss.max() < 1e-6
    assert gc.codazzi.max() < 1e-6
    assert gc.weingarten.max() < 1e-6
    assert np.abs(geo.quadric_residual(imm, pts)).max() < 1e-8


@pytest.mark.parametrize("c,index", [(1.0, 1), (-1.0, 1), (1.0, 0), (-1.0, 0)])
def test_umbilical_shape_operator(c, index):
    mu = 0.5 if c < 0 else 2.0
    imm = catalog.build_umbilical(geo.SpaceForm(4, index, c), mu)
    pts = an.chart_grid(imm, 3)
    data = geo.extrinsic_data(imm, pts)
    assert np.abs(data.shape_operator - mu * np.eye(3)).max() < 1e-10
    assert np.allclose(data.mean_curvature, data.epsilon * mu)


def test_orientation_flip(instances):
    imm = instances["4.3"]
    flip = imm.flipped()
    pts = an.chart_grid(imm, 2)
    a, b = geo.extrinsic_data(imm, pts), geo.extrinsic_data(flip, pts)
    assert np.array_equal(a.epsilon, b.epsilon)
    assert np.allclose(a.shape_operator, -b.shape_operator)
    assert np.allclose(a.mean_curvature, -b.mean_curvature)
    la_, lb = an.estimate_lambda(imm, pts), an.estimate_lambda(flip, pts)
    assert la_.value == pytest.approx(lb.value, rel=1e-9)


def test_intrinsic_curvature_of_totally_geodesic_slice():
    imm = catalog.build_umbilical(geo.SpaceForm(4, 1, 1.0), 0.0)
    pts = an.chart_grid(imm, 2)
    R = geo.riemann_tensor(imm, pts)
    G = geo.first_fundamental_form(imm, pts)
    d = np.eye(3)
    want = np.einsum("...jk,li->...lkij", G, d) - np.einsum("...ik,lj->...lkij", G, d)
    assert np.abs(R - want).max() < 1e-10


def test_christoffel_symmetric(instances):
    pts = an.chart_grid(instances["4.4"], 2)
    gam = geo.christoffel(instances["4.4"], pts)
    assert np.abs(gam - np.swapaxes(gam, -1, -2)).max() < 1e-12


def test_laplacian_of_coordinates_on_totally_geodesic_sphere():
    # Delta x = -n c x for a totally geodesic hypersurface of a space form
    imm = catalog.build_umbilical(geo.SpaceForm(4, 1, 1.0), 0.0)
    pts = an.chart_grid(imm, 3)
    x = imm(pts)
    for a in range(x.shape[-1]):
        lap = geo.laplace_beltrami(imm, lambda u: imm(u)[..., a], pts)
        assert np.abs(lap + 3.0 * x[..., a]).max() < 1e-6


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-2, 2), st.floats(-2, 2))
def test_fd_grad_hess_exact_on_quadratics(u0, u1, a, b):
    f = lambda u: a * u[..., 0] ** 2 + b * u[..., 0] * u[..., 1] + u[..., 1]  # noqa: E731
    g, H = geo.fd_grad_hess(f, np.array([u0, u1]))
    assert g == pytest.approx([2 * a * u0 + b * u1, b * u0 + 1], abs=1e-8)
    assert H == pytest.approx(np.array([[2 * a, b], [b, 0.0]]), abs=1e-6)


def test_fd_stencil_domain_check(instances):
    imm = instances["umbilical"]
    with pytest.raises(DomainError):
        geo.laplace_beltrami(imm, lambda u: u[..., 0], imm.lower)


def test_chunked_mean_curvature(instances):
    imm = instances["product"]
    rng = np.random.default_rng(0)
    pts = imm.lower + (imm.upper - imm.lower) * rng.random((1500, imm.n))
    H = geo.mean_curvature(imm, pts)
    assert H.shape == (1500,)
    assert H[1100] == pytest.approx(geo.extrinsic_data(imm, pts[1100]).mean_curvature)


def _null_curve():
    # t -> (t, 1, t) lies on S^2_1(1) but has a lightlike tangent
    def x(u):
        t = u[0]
        return jets.stack([t, t * 0.0 + 1.0, t])

    return geo.Immersion(geo.SpaceForm(2, 1, 1.0), 1, [-1.0], [1.0], x, name="null curve")


def test_degenerate_hypersurface_rejected():
    imm = _null_curve()
    assert np.abs(geo.quadric_residual(imm, np.array([[0.3]]))).max() == 0.0
    with pytest.raises(DegenerateMetricError):
        geo.extrinsic_data(imm, np.array([[0.3]]))


def test_immersion_validation(instances):
    with pytest.raises(DimensionError):
        geo.Immersion(geo.SpaceForm(3, 0, 1.0), 1, [0.0], [1.0], lambda u: u[0])
    imm = instances["4.3"]
    with pytest.raises(DomainError):
        imm(imm.upper + 1.0)
    with pytest.raises(DimensionError):
        imm(np.zeros(3))
    with pytest.raises(DimensionError):
        geo.immersion_jet(imm, imm.center, 0)
