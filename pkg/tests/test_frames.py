import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from pmcv import catalog, frames, jets
from pmcv.errors import DomainError, StructureError
from pmcv.geometry import SpaceForm


def _setup(B=None, n=4, p=2):
    sf = SpaceForm(n + 1, 1, 1.0)
    if B is None:
        B = [1.0 if i >= p else 0.0 for i in range(1, n + 1)]
    spec = catalog._spec_4_3(n, B)
    return spec, sf.signs, frames.initial_frame(spec.gram_target, sf.signs)


def test_uncorrected_sign_breaks_gram_preservation():
    n = 4
    B = [1.0] * n
    with pytest.raises(StructureError, match=r"E_1'.*E_3"):
        catalog._spec_4_3(n, B, sign=1.0)


def test_initial_frames_match_gram_tables(instances):
    for key in ("4.1", "4.2", "4.3", "4.4"):
        field = instances[key].metadata["frame"]
        G0 = frames.gram(field.frames[0], field.signs)
        assert np.abs(G0 - field.gram_target).max() < 1e-15
        assert field.gram_drift() < 1e-10


def test_bad_initial_frame_rejected():
    spec, signs, F0 = _setup()
    with pytest.raises(StructureError):
        frames.integrate_frame(spec, (0.0, 1.0), 1.01 * F0, signs)


def test_from_relations_unknown_coefficient():
    T = np.eye(2)
    with pytest.raises(StructureError):
        frames.FrameODESpec.from_relations(T, {(1, 2): [(1.0, "a")]}, {})


def test_complete_closure_is_skew():
    T = np.diag([-1.0, 1.0, 1.0])
    spec = frames.FrameODESpec.from_relations(T, {(1, 2): [(1.0, "a")]}, {"a": 2.0}, complete=True)
    M = spec.matrix(0.0)
    assert np.abs(M @ T + T @ M.T).max() == 0.0
    assert M[1, 0] == pytest.approx(2.0)  # <E_2', E_1> = -<E_2, E_1'> up to the Gram signs


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-9, 1e-4))
def test_projection_restores_gram(seed, size):
    spec, signs, F0 = _setup()
    rng = np.random.default_rng(seed)
    F = F0 + size * rng.normal(size=F0.shape)
    P = frames.project_frame(F, spec.gram_target, signs)
    assert np.abs(frames.gram(P, signs) - spec.gram_target).max() < 1e-13
    assert np.abs(P - F).max() < 10 * size


def test_variable_coefficients_against_reference_solver():
    B = [0.0, lambda t: 1.0 + 0.5 * jets.sin(t), lambda t: jets.cos(t), 0.3]
    spec, signs, F0 = _setup(B)
    field = frames.integrate_frame(spec, (0.0, 1.5), F0, signs, step=1e-3)
    N = F0.shape[0]
    ref = solve_ivp(lambda t, y: (spec.matrix(t) @ y.reshape(N, N)).ravel(), (0.0, 1.5), F0.ravel(),
                    rtol=1e-12, atol=1e-13, dense_output=True)
    for t in np.linspace(0.0, 1.5, 37):  # includes points between RK4 nodes
        assert np.abs(field(t) - ref.sol(t).reshape(N, N)).max() < 1e-9
    assert field.drift < 1e-10


def test_dense_output_derivative_satisfies_ode():
    B = [0.0, lambda t: 1.0 + 0.5 * jets.sin(t), lambda t: jets.cos(t), 0.3]
    spec, signs, F0 = _setup(B)
    field = frames.integrate_frame(spec, (0.0, 1.0), F0, signs, step=1e-3)
    for t0 in (0.1234, 0.5, 0.99951):
        c = field.local_coefficients(np.array(t0), 1)
        assert np.abs(c[1] - spec.matrix(t0) @ c[0]).max() < 1e-10


def test_jet_fast_path_matches_composition():
    spec, signs, F0 = _setup()
    field = frames.integrate_frame(spec, (0.0, 1.0), F0, signs, step=1e-2)
    t, s = jets.variables(np.array([[0.3137, 0.2], [0.5, -0.1]]), 4)
    fast = field.jet(t)
    generic = t[..., None, None].compose(list(field.local_coefficients(t.value, t.order)))
    assert np.abs(fast.c - generic.c).max() < 1e-13
    # a non-coordinate argument takes the generic route
    u = t + 0.1 * s * s
    assert field.jet(u).value == pytest.approx(field(u.value))


def test_outside_interval():
    spec, signs, F0 = _setup()
    field = frames.integrate_frame(spec, (0.0, 1.0), F0, signs, step=1e-2)
    with pytest.raises(DomainError):
        field(1.5)
    with pytest.raises(DomainError):
        frames.integrate_frame(spec, (1.0, 0.0), F0, signs)


def test_rk4_order_on_constant_spec():
    from scipy.linalg import expm

    spec, signs, F0 = _setup()
    M = spec.matrix(0.0)
    errs = []
    for h in (0.2, 0.1):
        f = frames.integrate_frame(spec, (0.0, 1.0), F0, signs, step=h, project=False)
        errs.append(np.abs(f.frames[-1] - expm(M) @ F0).max())
    assert 3.5 < math.log2(errs[0] / errs[1]) < 4.5
