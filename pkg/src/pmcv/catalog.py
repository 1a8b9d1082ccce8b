"""Verified example hypersurfaces.

Examples 4.1-4.4 are Lorentzian hypersurfaces with two principal curvatures
and non-diagonalizable shape operators, built from one-parameter moving
frames.  Baseline umbilical and product hypersurfaces cover the
diagonalizable case.  All maps are written with jet arithmetic, so their
derivatives are exact up to the frame integration error.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from . import jets
from .errors import DimensionError, DomainError
from .frames import (
    FrameField,
    FrameODESpec,
    initial_frame,
    integrate_frame,
)
from .geometry import Immersion, SpaceForm, extrinsic_data

__all__ = [
    "FrameField",
    "FrameODESpec",
    "integrate_frame",
    "example_4_1",
    "example_4_2",
    "example_4_3",
    "example_4_4",
    "build_umbilical",
    "build_product",
    "perturbed",
    "theta_from_cot",
    "from_descriptor",
    "EXAMPLES",
]

FRAME_STEP = 1e-3
CHART_HALF_WIDTH = 0.5
ANGLE_HALF_WIDTH = 0.5


# -- helpers -----------------------------------------------------------------
def _scale(s, V):
    """Scalar (float or scalar jet) times an ambient-vector jet."""
    if isinstance(s, jets.Jet):
        return s[..., None] * V
    return V * s


def _sum(terms):
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _sphere(angles: Sequence) -> list:
    """Angular chart of the open half-sphere with positive first coordinate.

    ``k`` angles in ``(-pi/2, pi/2)`` give ``k + 1`` coordinates.
    """
    w: list = [1.0]
    for a in angles:
        ca, sa = jets.cos(a), jets.sin(a)
        w = [c * ca for c in w] + [sa]
    return w


def theta_from_cot(k: float) -> float:
    """The angle theta with ``cot(theta + pi/4) = k``."""
    return math.atan2(1.0, k) - math.pi / 4


def _check_theta(theta: float):
    r = math.remainder(theta - math.pi / 4, math.pi / 2)
    if abs(r) < 1e-12:
        raise DomainError("theta = k*pi/4 with odd k is excluded (cot(theta + pi/4) is 0 or infinite)")


def _sample_coefficient(f, t_range, count=201):
    ts = np.linspace(*t_range, count)
    v = f(ts) if callable(f) else f
    return np.broadcast_to(np.asarray(v, dtype=float), ts.shape)


def _orient(imm: Immersion, expected: Sequence[float]) -> Immersion:
    """Fix the normal so the spectrum at the chart center matches ``expected``.

    Flipping the normal negates the shape operator; the choice is a global
    convention and does not affect any invariant that is later verified.
    """
    if not np.any(np.abs(expected) > 0):
        return imm
    A = extrinsic_data(imm, imm.center).shape_operator
    ev = np.sort(np.linalg.eigvals(A).real)
    target = np.sort(np.asarray(expected, dtype=float))
    if np.abs(ev - target).max() > np.abs(np.sort(-ev) - target).max():
        imm.orientation = -imm.orientation
    return imm


def _box(chart_dim, t_range, widths):
    lo = np.array([t_range[0]] + [-w for w in widths], dtype=float)
    hi = np.array([t_range[1]] + [w for w in widths], dtype=float)
    assert lo.shape == (chart_dim,)
    return lo, hi


def _frame_vectors(field: FrameField, t):
    F = field.jet(t)
    return lambda k: F[..., k - 1, :]


# -- Examples 4.1 / 4.2 ---------------------------------------------------------
def _hyperbolic_spec(n: int, mu: float, B, pair: int) -> FrameODESpec:
    """Frame of Examples 4.1 (pair=2) and 4.2 (pair=3) in E^{n+2}_2.

    Gram table: E_1 null, paired with E_pair; E_{n+2} unit timelike; all
    other vectors unit spacelike.  Relations ``E_{n+2}' = E_1`` and
    ``E_{n+1}' = mu E_1 + B E_2``; the remaining rows follow from
    skew-adjointness with zero in the free (span-only) slots.
    """
    N = n + 2
    T = np.eye(N)
    T[0, 0] = T[pair - 1, pair - 1] = 0.0
    T[0, pair - 1] = T[pair - 1, 0] = 1.0
    T[N - 1, N - 1] = -1.0
    relations = {
        (N, 1): [(1.0, "one")],
        (N - 1, 1): [(1.0, "mu")],
        (N - 1, 2): [(1.0, "B")],
    }
    return FrameODESpec.from_relations(
        T, relations, {"one": 1.0, "mu": mu, "B": B}, complete=True,
        metadata={"closure": "zero in span-only slots"},
    )


def _hyperbolic_example(n, p, mu, B, t_range, pair, name, form, p_min):
    if not p_min <= p <= n:
        raise DimensionError(f"{name} needs {p_min} <= p <= n")
    if mu == 0:
        raise DomainError("mu must be nonzero")
    B = 1.0 if B is None else B
    if np.any(np.abs(_sample_coefficient(B, t_range)) < 1e-12):
        raise DomainError("coefficient B must not vanish on t_range")
    sf = SpaceForm(n + 1, 1, -1.0)
    spec = _hyperbolic_spec(n, mu, B, pair)
    signs = sf.signs
    field = integrate_frame(spec, t_range, initial_frame(spec.gram_target, signs), signs, FRAME_STEP)
    m2 = mu * mu
    N = n + 2
    # index sets (1-based y_j) entering the square roots
    inner = list(range(3, p + 1)) if pair == 2 else [2] + list(range(4, p + 1))
    outer = list(range(p + 1, n + 1))
    unit = list(range(3, n + 1)) if pair == 2 else [2] + list(range(4, n + 1))

    def x(u):
        t, ys = u[0], u[1:]
        E = _frame_vectors(field, t)
        y = {j: ys[j - 2] for j in range(2, n + 1)}
        lin = _sum([_scale(y[j], E(j)) for j in range(2, n + 1)])
        if m2 == 1.0:
            S = 0.5 * _sum([y[i] * y[i] for i in unit])
            return lin + _scale(1.0 + S, E(N)) - _scale(S, E(N - 1))
        d = m2 - 1.0
        a2 = 1.0 / d**2 - (_sum([y[i] * y[i] for i in inner]) / d if inner else 0.0)
        b2 = m2 / d**2 + (_sum([y[i] * y[i] for i in outer]) / d if outer else 0.0)
        a = np.sign(1.0 - m2) * jets.sqrt(a2 + 0.0 * ys[0])
        b = np.sign(mu * (1.0 - m2)) * jets.sqrt(b2 + 0.0 * ys[0])
        return _scale(a, E(N) - mu * E(N - 1)) + lin + _scale(b, E(N - 1) - mu * E(N))

    lo, hi = _box(n, t_range, [CHART_HALF_WIDTH * 0.6] * (n - 1))
    lam = p * m2 + (n - p) / m2
    expected = [mu] * p + [1.0 / mu] * (n - p)
    imm = Immersion(sf, n, lo, hi, x, name=name, metadata={
        "example": name.split()[-1], "n": n, "p": p, "mu": mu,
        "principal_curvatures": expected, "lambda": lam, "form": form,
        "closure": spec.metadata["closure"], "frame_drift": field.drift,
    })
    imm.metadata["frame"] = field
    return _orient(imm, expected)


def example_4_1(n: int = 4, p: int = 2, mu: float = math.sqrt(2.0), B=None, t_range=(0.0, 1.0)) -> Immersion:
    """Type II Lorentzian hypersurface of ``H^{n+1}_1(-1)``.

    Principal curvatures ``mu`` (multiplicity p, one 2x2 Jordan block) and
    ``1/mu`` (multiplicity n-p); PMCV with ``lambda = p mu^2 + (n-p)/mu^2``.
    """
    return _hyperbolic_example(n, p, mu, B, t_range, 2, "Example 4.1", "II", 2)


def example_4_2(n: int = 4, p: int = 3, mu: float = math.sqrt(2.0), B=None, t_range=(0.0, 1.0)) -> Immersion:
    """Type III Lorentzian hypersurface of ``H^{n+1}_1(-1)`` (one 3x3 Jordan block)."""
    return _hyperbolic_example(n, p, mu, B, t_range, 3, "Example 4.2", "III", 3)


# -- Examples 4.3 / 4.4 ---------------------------------------------------------
def _spec_4_3(n: int, B: Sequence, sign: float = -1.0) -> FrameODESpec:
    """Frame of Example 4.3 in E^{n+2}_1.

    ``<E_1, E_2> = 1``, E_3..E_{n+2} unit spacelike, and
    ``E_1' = sign * sum_{i>=3} B_{i-2} E_i``, ``E_2' = -E_3``,
    ``E_3' = E_1 + B_1 E_2``, ``E_k' = B_{k-2} E_2`` (k >= 4).
    ``sign = -1`` is the Gram-preserving choice; ``+1`` is rejected.
    """
    N = n + 2
    T = np.eye(N)
    T[0, 0] = T[1, 1] = 0.0
    T[0, 1] = T[1, 0] = 1.0
    rel: dict = {}
    for i in range(3, N + 1):
        rel[(1, i)] = [(sign, f"B{i - 2}")]
    rel[(2, 3)] = [(-1.0, "one")]
    rel[(3, 1)] = [(1.0, "one")]
    rel[(3, 2)] = [(1.0, "B1")]
    for k in range(4, N + 1):
        rel[(k, 2)] = [(1.0, f"B{k - 2}")]
    funcs = {"one": 1.0, **{f"B{i}": B[i - 1] for i in range(1, n + 1)}}
    return FrameODESpec.from_relations(T, rel, funcs)


def _spec_4_4(n: int, p: int, B: dict, C: dict, sign: float = -1.0) -> FrameODESpec:
    """Frame of Example 4.4 in E^{n+2}_1.

    ``<E_1, E_3> = 1``, E_2 and E_4..E_{n+2} unit spacelike;
    ``E_1' = sign (B_1 E_2 + sum_{i>=4} B_{i-1} E_i)``, ``E_3' = E_2``,
    ``E_2' = -E_1 + B_1 E_3``, ``E_r' = B_{r-1} E_3 + sum_a C_{ra} E_a``,
    ``E_b' = B_{b-1} E_3 - sum_s C_{sb} E_s``.
    """
    N = n + 2
    T = np.eye(N)
    T[0, 0] = T[2, 2] = 0.0
    T[0, 2] = T[2, 0] = 1.0
    rel: dict = {(1, 2): [(sign, "B1")]}
    for i in range(4, N + 1):
        rel[(1, i)] = [(sign, f"B{i - 1}")]
    rel[(3, 2)] = [(1.0, "one")]
    rel[(2, 1)] = [(-1.0, "one")]
    rel[(2, 3)] = [(1.0, "B1")]
    for r in range(4, p + 2):
        rel[(r, 3)] = [(1.0, f"B{r - 1}")]
        for a in range(p + 2, N + 1):
            rel[(r, a)] = [(1.0, f"C{r},{a}")]
    for b in range(p + 2, N + 1):
        rel[(b, 3)] = [(1.0, f"B{b - 1}")]
        for s in range(4, p + 2):
            rel[(b, s)] = [(-1.0, f"C{s},{b}")]
    funcs = {"one": 1.0}
    funcs.update({f"B{i}": B[i] for i in B})
    funcs.update({f"C{r},{a}": C[(r, a)] for r in range(4, p + 2) for a in range(p + 2, N + 1)})
    return FrameODESpec.from_relations(T, rel, funcs)


def _de_sitter_expected(n, p, theta):
    k = 1.0 / math.tan(theta + math.pi / 4)
    return k, [k] * p + [-1.0 / k] * (n - p), p * k * k + (n - p) / (k * k)


def example_4_3(n: int = 4, p: int = 2, theta: float | None = None, B=None, t_range=(0.0, 1.0), cot: float | None = None) -> Immersion:
    """Type II Lorentzian hypersurface of ``S^{n+1}_1(1)``.

    Principal curvatures ``cot(theta + pi/4)`` (multiplicity p) and
    ``-tan(theta + pi/4)``.  Pass ``theta`` or ``cot = cot(theta + pi/4)``.
    """
    if not 2 <= p <= n:
        raise DimensionError("Example 4.3 needs 2 <= p <= n")
    theta = _resolve_theta(theta, cot)
    if B is None:
        B = [1.0 if i >= p else 0.0 for i in range(1, n + 1)]
    if len(B) != n:
        raise DimensionError("Example 4.3 needs n coefficient functions B_1..B_n")
    tail = sum(_sample_coefficient(B[i - 1], t_range) ** 2 for i in range(p, n + 1))
    if np.any(tail <= 1e-24):
        raise DomainError("sum of B_i^2 over i >= p must stay positive on t_range")
    sf = SpaceForm(n + 1, 1, 1.0)
    spec = _spec_4_3(n, B)
    field = integrate_frame(spec, t_range, initial_frame(spec.gram_target, sf.signs), sf.signs, FRAME_STEP)
    cm, sm = math.cos(theta - math.pi / 4), math.sin(theta - math.pi / 4)
    N = n + 2

    def x(u):
        t, v = u[0], u[1]
        y = _sphere(u[2:p])  # y_3 .. y_{p+1}
        z = _sphere(u[p:])  # z_{p+2} .. z_{n+2}
        E = _frame_vectors(field, t)
        first = _scale(v, E(2)) + _sum([_scale(y[i - 3], E(i)) for i in range(3, p + 2)])
        second = _sum([_scale(z[a - p - 2], E(a)) for a in range(p + 2, N + 1)])
        return cm * first - sm * second

    lo, hi = _box(n, t_range, [CHART_HALF_WIDTH] + [ANGLE_HALF_WIDTH] * (n - 2))
    k, expected, lam = _de_sitter_expected(n, p, theta)
    imm = Immersion(sf, n, lo, hi, x, name="Example 4.3", metadata={
        "example": "4.3", "n": n, "p": p, "theta": theta, "cot": k,
        "principal_curvatures": expected, "lambda": lam, "form": "II",
        "frame_drift": field.drift,
    })
    imm.metadata["frame"] = field
    return _orient(imm, expected)


def example_4_4(
    n: int = 4, p: int = 3, theta: float | None = None, B=None, C=None,
    t_range=(0.0, 1.0), cot: float | None = None,
) -> Immersion:
    """Type III Lorentzian hypersurface of ``S^{n+1}_1(1)``.

    ``B`` maps i in {1, 3, .., n+1} to coefficient functions; ``C`` maps
    ``(r, alpha)`` to functions and must not vanish identically.
    """
    if not 3 <= p <= n:
        raise DimensionError("Example 4.4 needs 3 <= p <= n")
    theta = _resolve_theta(theta, cot)
    N = n + 2
    B = {i: 1.0 for i in [1] + list(range(3, n + 2))} if B is None else dict(B)
    pairs = [(r, a) for r in range(4, p + 2) for a in range(p + 2, N + 1)]
    if C is None:
        C = {pairs[0]: 1.0}
    C = {pr: C.get(pr, 0.0) for pr in pairs}
    if not any(np.any(_sample_coefficient(C[pr], t_range) != 0) for pr in pairs):
        raise DomainError("the matrix (C_{r alpha}) must not vanish")
    sf = SpaceForm(n + 1, 1, 1.0)
    spec = _spec_4_4(n, p, B, C)
    field = integrate_frame(spec, t_range, initial_frame(spec.gram_target, sf.signs), sf.signs, FRAME_STEP)
    cm, sm = math.cos(theta - math.pi / 4), math.sin(theta - math.pi / 4)
    st = math.sin(theta)

    def x(u):
        t, v = u[0], u[1]
        y = _sphere(u[2:p])  # y_3 .. y_{p+1}, y_3 > 0 on the chart
        z = _sphere(u[p:])  # z_{p+2} .. z_{n+2}
        E = _frame_vectors(field, t)
        Y = {r: y[r - 3] for r in range(3, p + 2)}
        Z = {a: z[a - p - 2] for a in range(p + 2, N + 1)}
        first = _scale(v, E(3)) + _scale(Y[3], E(2)) + _sum([_scale(Y[r], E(r)) for r in range(4, p + 2)])
        second = _sum([_scale(Z[a], E(a)) for a in Z])
        psi = _sum([_scale_scalar(Y[r] * Z[a], C[(r, a)], t) for r, a in pairs])
        corr = psi / Y[3] if isinstance(Y[3], jets.Jet) else psi * (1.0 / Y[3])
        return cm * first - sm * second - math.sqrt(2.0) * st * _scale(corr, E(3))

    lo, hi = _box(n, t_range, [CHART_HALF_WIDTH] + [ANGLE_HALF_WIDTH] * (n - 2))
    k, expected, lam = _de_sitter_expected(n, p, theta)
    imm = Immersion(sf, n, lo, hi, x, name="Example 4.4", metadata={
        "example": "4.4", "n": n, "p": p, "theta": theta, "cot": k,
        "principal_curvatures": expected, "lambda": lam, "form": "III",
        "frame_drift": field.drift,
    })
    imm.metadata["frame"] = field
    return _orient(imm, expected)


def _scale_scalar(s, f, t):
    """``s * f(t)`` for a scalar jet/float ``s`` and a coefficient function."""
    if callable(f):
        return s * f(t)
    return s * float(f)


def _resolve_theta(theta, cot):
    if (theta is None) == (cot is None):
        raise DomainError("give exactly one of theta or cot")
    if theta is None:
        if cot == 0:
            raise DomainError("cot(theta + pi/4) = 0 is excluded")
        theta = theta_from_cot(cot)
    _check_theta(theta)
    return float(theta)


# -- baselines ------------------------------------------------------------------
def _graph_quadric(y_free: list, signs_free, sign_solved, rho):
    """Coordinate ``w`` with ``sign_solved w^2 + sum signs_free y^2 = rho``, w > 0."""
    acc = rho
    for s, y in zip(signs_free, y_free):
        acc = acc - s * y * y
    return jets.sqrt(acc * sign_solved)


def build_umbilical(space_form: SpaceForm, mu: float, epsilon: int | None = None) -> Immersion:
    """Totally umbilical hypersurface ``<x, a> = kappa`` with ``A = mu I``.

    ``a`` is a unit vector with ``<a, a> = delta``; the slice is
    nondegenerate when ``eps delta c (c + eps mu^2) > 0``.  ``epsilon`` picks
    the causal character of the normal (default: spacelike when possible).
    """
    c = space_form.curvature
    signs = space_form.signs
    N = len(signs)
    n = space_form.n
    if epsilon is None:
        epsilon = 1 if (c > 0 or mu * mu != -c) else -1
    if epsilon not in (1, -1):
        raise DomainError("epsilon must be +1 or -1")
    if mu == 0:
        delta = epsilon
        kappa = 0.0
    else:
        if c > 0:
            delta = 1 if (epsilon == 1 or mu * mu > c) else -1
        else:
            delta = (1 if mu * mu < -c else -1) if epsilon == 1 else -1
        denom = c * (c + epsilon * mu * mu)
        q = epsilon * delta * mu * mu / denom if denom != 0 else math.inf
        if not q > 0 or not math.isfinite(q):
            raise DomainError("no nondegenerate umbilical slice for this (space form, mu, epsilon)")
        kappa = math.sqrt(q)
    pool = [i for i in range(N) if signs[i] == delta]
    if not pool:
        raise DomainError("ambient space has no unit vector of the required causal character")
    ia = pool[-1] if delta > 0 else pool[0]
    rest = [i for i in range(N) if i != ia]
    rho = 1.0 / c - kappa * kappa * delta
    sgn_rho = 1.0 if rho > 0 else -1.0
    cand = [i for i in rest if signs[i] == sgn_rho]
    if not cand or rho == 0:
        raise DomainError("umbilical slice is degenerate")
    isolved = cand[0] if sgn_rho < 0 else cand[-1]
    free = [i for i in rest if i != isolved]
    width = 0.3 * math.sqrt(abs(rho))

    def x(u):
        w = _graph_quadric(u, [signs[i] for i in free], sgn_rho, rho)
        comps: list = [None] * N
        comps[ia] = kappa * delta + 0.0 * u[0]
        comps[isolved] = w
        for i, yi in zip(free, u):
            comps[i] = yi
        return jets.stack(comps, axis=-1)

    lo, hi = -width * np.ones(n), width * np.ones(n)
    imm = Immersion(space_form, n, lo, hi, x, name=f"umbilical mu={mu:g}", metadata={
        "example": "umbilical", "n": n, "mu": mu, "epsilon": epsilon,
        "principal_curvatures": [mu] * n, "lambda": epsilon * n * mu * mu, "form": "I",
    })
    return _orient(imm, [mu] * n)


def build_product(n: int = 3, k: int = 1, r1: float | None = None) -> Immersion:
    """Clifford-type product ``S^k(r1) x S^{n-k}(r2)`` in ``S^{n+1}(1)``.

    ``r1^2 + r2^2 = 1``; principal curvatures ``-r2/r1`` (multiplicity k)
    and ``r1/r2``.  The default radius makes it minimal.
    """
    if not 1 <= k < n:
        raise DimensionError("product needs 1 <= k < n")
    r1 = math.sqrt(k / n) if r1 is None else float(r1)
    if not 0 < r1 < 1:
        raise DomainError("r1 must lie in (0, 1)")
    r2 = math.sqrt(1 - r1 * r1)
    sf = SpaceForm(n + 1, 0, 1.0)

    def x(u):
        a = _sphere(u[:k])
        b = _sphere(u[k:])
        comps = [r1 * w for w in a] + [r2 * w for w in b]
        comps = [cj if isinstance(cj, jets.Jet) else cj + 0.0 * u[0] for cj in comps]
        return jets.stack(comps, axis=-1)

    lo, hi = -ANGLE_HALF_WIDTH * np.ones(n), ANGLE_HALF_WIDTH * np.ones(n)
    mu, nu = -r2 / r1, r1 / r2
    expected = [mu] * k + [nu] * (n - k)
    imm = Immersion(sf, n, lo, hi, x, name=f"product S^{k} x S^{n - k}", metadata={
        "example": "product", "n": n, "p": k, "r1": r1,
        "principal_curvatures": expected, "lambda": k * mu * mu + (n - k) * nu * nu,
        "form": "I",
    })
    return _orient(imm, expected)


def perturbed(imm: Immersion, delta: float = 1e-2, seed: int = 0, modes: int = 3) -> Immersion:
    """``x + delta * w(u)`` with smooth pseudo-random ``w``; leaves the quadric.

    Used as a negative control: the result is not a hypersurface of the
    space form, so Codazzi and isoparametric checks must fail.
    """
    rng = np.random.default_rng(seed)
    m = imm.chart_dim
    N = imm.space_form.dim + 1
    freqs = rng.uniform(1.0, 3.0, size=(modes, m)) * rng.choice([-1, 1], size=(modes, m))
    phases = rng.uniform(0, 2 * math.pi, size=modes)
    vecs = rng.normal(size=(modes, N))
    base = imm.map

    def x(u):
        out = base(u)
        for f, ph, w in zip(freqs, phases, vecs):
            arg = _sum([fi * ui for fi, ui in zip(f, u)]) + ph
            out = out + _scale(delta * jets.sin(arg), w)
        return out

    meta = dict(imm.metadata)
    meta.update({"perturbation": delta, "seed": seed})
    meta.pop("lambda", None)
    return Immersion(imm.space_form, m, imm.lower, imm.upper, x, f"{imm.name} (perturbed)", imm.orientation, meta)


EXAMPLES: dict[str, Callable[..., Immersion]] = {
    "4.1": example_4_1,
    "4.2": example_4_2,
    "4.3": example_4_3,
    "4.4": example_4_4,
}


def from_descriptor(desc: dict) -> Immersion:
    """Build an instance from ``{example_id, n, p, mu_or_theta, ...}``.

    For Examples 4.3/4.4 ``cot`` may replace ``mu_or_theta``; ``perturb``
    applies :func:`perturbed`.
    """
    ex = str(desc.get("example_id", desc.get("example")))
    n = int(desc.get("n", 4))
    t_range = tuple(desc.get("t_range", (0.0, 1.0)))
    if ex in ("4.1", "4.2"):
        p = int(desc.get("p", 2 if ex == "4.1" else 3))
        mu = float(desc.get("mu_or_theta", desc.get("mu", math.sqrt(2.0))))
        imm = EXAMPLES[ex](n=n, p=p, mu=mu, t_range=t_range)
    elif ex in ("4.3", "4.4"):
        p = int(desc.get("p", 2 if ex == "4.3" else 3))
        if desc.get("cot") is not None:
            imm = EXAMPLES[ex](n=n, p=p, cot=float(desc["cot"]), t_range=t_range)
        else:
            theta = desc.get("mu_or_theta", desc.get("theta"))
            if theta is None:
                imm = EXAMPLES[ex](n=n, p=p, cot=2.0, t_range=t_range)
            else:
                imm = EXAMPLES[ex](n=n, p=p, theta=float(theta), t_range=t_range)
    elif ex == "umbilical":
        sf = SpaceForm(n + 1, int(desc.get("index", 1)), float(desc.get("c", 1.0)))
        imm = build_umbilical(sf, float(desc.get("mu_or_theta", desc.get("mu", 0.0))), desc.get("epsilon"))
    elif ex == "product":
        imm = build_product(n, int(desc.get("p", 1)), desc.get("r1"))
    else:
        raise DomainError(f"unknown example '{ex}'")
    if desc.get("perturb"):
        imm = perturbed(imm, float(desc["perturb"]), int(desc.get("seed", 0)))
    return imm
