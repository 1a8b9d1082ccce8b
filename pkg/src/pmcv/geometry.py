"""Extrinsic geometry of hypersurfaces in pseudo-Riemannian space forms.

Space forms are realized as quadrics ``<x, x> = 1/c`` in a pseudo-Euclidean
space with diagonal metric (minus signs first).  Every function accepts a
single chart point of shape ``(m,)`` or a batch ``(..., m)``; outputs gain
the same leading batch shape.

Conventions (kept fixed across the package):

* ``h(X, Y) = eps <D_X Y, xi>`` is the scalar second fundamental form, so
  the normal part of ``D_X Y`` is ``h(X, Y) xi``.
* ``A`` is the shape operator of ``xi``: ``<A X, Y> = <D_X Y, xi> = eps h``.
* ``H = eps tr(A) / n`` and the mean curvature vector is ``H xi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets
from .errors import DegenerateMetricError, DimensionError, DomainError, LightlikeNormalError
from .linalg import Signature

DEFAULT_TOL = 1e-8
_CHUNK = 1024


@dataclass(frozen=True)
class SpaceForm:
    """``N^{dim}_{index}(curvature)`` as a quadric in ``E^{dim+1}``."""

    dim: int
    index: int
    curvature: float

    def __post_init__(self):
        if self.curvature == 0:
            raise ValueError("flat ambient spaces are not supported; curvature must be nonzero")
        if not 0 <= self.index <= self.dim:
            raise DimensionError(f"index {self.index} outside [0, {self.dim}]")

    @property
    def n(self) -> int:
        """Dimension of hypersurfaces in this space form."""
        return self.dim - 1

    @property
    def radius_squared(self) -> float:
        return 1.0 / abs(self.curvature)

    @property
    def ambient_signature(self) -> Signature:
        idx = self.index if self.curvature > 0 else self.index + 1
        return Signature(self.dim + 1, idx)

    @property
    def signs(self) -> np.ndarray:
        return np.diag(self.ambient_signature.metric()).copy()

    @property
    def label(self) -> str:
        kind = "S" if self.curvature > 0 else "H"
        return f"{kind}^{self.dim}_{self.index}({self.curvature:g})"


@dataclass
class Immersion:
    """Chart map into the ambient space of ``space_form``.

    ``map`` receives the list of chart-coordinate jets and must return an
    ambient-vector jet (tail ``(..., N)``); writing it with :mod:`pmcv.jets`
    operations makes every derivative exact.
    """

    space_form: SpaceForm
    chart_dim: int
    lower: np.ndarray
    upper: np.ndarray
    map: Callable[[list], "jets.Jet"]
    name: str = "immersion"
    orientation: int = 1
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != (self.chart_dim,) or self.upper.shape != (self.chart_dim,):
            raise DimensionError("domain box must match the chart dimension")
        if self.chart_dim != self.space_form.n:
            raise DimensionError(
                f"chart dimension {self.chart_dim} is not a hypersurface of {self.space_form.label}"
            )

    @property
    def n(self) -> int:
        return self.chart_dim

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, u, margin=0.0) -> bool:
        u = np.asarray(u, dtype=float)
        margin = np.asarray(margin, dtype=float)
        return bool(np.all(u - margin >= self.lower) and np.all(u + margin <= self.upper))

    def jet(self, u, order: int) -> "jets.Jet":
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.chart_dim:
            raise DimensionError(f"chart point has {u.shape[-1]} coordinates, expected {self.chart_dim}")
        if not self.contains(u):
            raise DomainError(f"chart point outside the domain of {self.name}")
        out = self.map(jets.variables(u, order))
        out.base_point = u
        return out

    def __call__(self, u) -> np.ndarray:
        return self.jet(u, 0).value

    def flipped(self) -> "Immersion":
        """Same map with the opposite normal orientation."""
        return Immersion(
            self.space_form, self.chart_dim, self.lower, self.upper, self.map,
            self.name, -self.orientation, dict(self.metadata),
        )


def immersion_jet(imm: Immersion, u, order: int) -> "jets.Jet":
    """All partial derivatives of ``imm`` at ``u`` up to ``order``."""
    if not 1 <= order <= jets.MAX_ORDER:
        raise DimensionError(f"order must be in [1, {jets.MAX_ORDER}]")
    return imm.jet(u, order)


def _derivative_stack(J: "jets.Jet", k: int) -> np.ndarray:
    # (..., N, m, .., m) -> (..., m, .., m, N)
    return np.moveaxis(J.derivatives(k), -k - 1, -1)


def _inner(a, b, signs):
    return np.sum(a * signs * b, axis=-1)


@dataclass
class ExtrinsicData:
    point: np.ndarray
    metric: np.ndarray
    normal: np.ndarray
    epsilon: np.ndarray
    second_form: np.ndarray
    shape_operator: np.ndarray
    mean_curvature: np.ndarray
    position: np.ndarray = None
    tangents: np.ndarray = None
    hessian: np.ndarray = None


def _metric(X1, signs, tol):
    G = np.einsum("...ia,a,...ja->...ij", X1, signs, X1)
    G = 0.5 * (G + np.swapaxes(G, -1, -2))
    n = G.shape[-1]
    norm = np.abs(G).max(axis=(-1, -2))
    det = np.linalg.det(G)
    bad = np.abs(det) <= tol * np.maximum(norm, 1e-300) ** n
    if np.any(bad):
        raise DegenerateMetricError(f"induced metric degenerate at {int(bad.sum())} point(s)")
    return G


def _normal(x0, X1, signs, orientation, tol):
    """Unit normal from the generalized cross product of (x_1, ..., x_n, x).

    The cross product ``w`` (with ``<k, v> = det[R; v]`` for ``k = eta w``)
    is Euclidean-orthogonal to the rows ``R``, so ``w = det[R; q] q`` for
    the unit Euclidean complement ``q``; its sign is continuous in ``u``.
    """
    R = np.concatenate([X1, x0[..., None, :]], axis=-2)  # (..., N-1, N)
    Q, _ = np.linalg.qr(np.swapaxes(R, -1, -2), mode="complete")
    q = Q[..., :, -1]
    w = np.linalg.det(np.concatenate([R, q[..., None, :]], axis=-2))[..., None] * q
    k = signs * w
    nq = _inner(k, k, signs)
    e2 = np.sum(k * k, axis=-1)
    if np.any(np.abs(nq) <= tol * e2):
        raise LightlikeNormalError("normal direction is lightlike; hypersurface is degenerate")
    eps = np.sign(nq)
    xi = orientation * k / np.sqrt(np.abs(nq))[..., None]
    return xi, eps


def extrinsic_data(imm: Immersion, u, tol: float = DEFAULT_TOL) -> ExtrinsicData:
    """Metric, normal, second fundamental form, shape operator and H at ``u``."""
    u = np.asarray(u, dtype=float)
    signs = imm.space_form.signs
    J = imm.jet(u, 2)
    x0 = J.value
    X1 = _derivative_stack(J, 1)
    X2 = _derivative_stack(J, 2)
    G = _metric(X1, signs, tol)
    xi, eps = _normal(x0, X1, signs, imm.orientation, tol)
    b = np.einsum("...ija,a,...a->...ij", X2, signs, xi)  # <x_ij, xi>
    h = eps[..., None, None] * b
    A = np.linalg.solve(G, b)
    H = eps * np.trace(A, axis1=-2, axis2=-1) / imm.n
    return ExtrinsicData(u, G, xi, eps, h, A, H, x0, X1, X2)


def first_fundamental_form(imm: Immersion, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    signs = imm.space_form.signs
    J = imm.jet(np.asarray(u, dtype=float), 1)
    return _metric(_derivative_stack(J, 1), signs, tol)


def unit_normal(imm: Immersion, u, tol: float = DEFAULT_TOL):
    """Return ``(xi, eps)``.

    ``xi`` is the normalized generalized cross product of the tangents and
    the position vector, times ``imm.orientation``; it varies smoothly over
    the chart.
    """
    signs = imm.space_form.signs
    J = imm.jet(np.asarray(u, dtype=float), 1)
    return _normal(J.value, _derivative_stack(J, 1), signs, imm.orientation, tol)


def second_fundamental_form(imm: Immersion, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    return extrinsic_data(imm, u, tol).second_form


def shape_operator(imm: Immersion, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    return extrinsic_data(imm, u, tol).shape_operator


def mean_curvature(imm: Immersion, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    """H at one or many chart points, evaluated in memory-bounded chunks."""
    u = np.asarray(u, dtype=float)
    flat = u.reshape(-1, u.shape[-1])
    out = np.empty(flat.shape[0])
    for s in range(0, flat.shape[0], _CHUNK):
        out[s:s + _CHUNK] = extrinsic_data(imm, flat[s:s + _CHUNK], tol).mean_curvature
    return out.reshape(u.shape[:-1])


@dataclass
class _Connection:
    G: np.ndarray
    Ginv: np.ndarray
    dG: np.ndarray  # dG[..., k, i, j] = d_k g_ij
    gamma: np.ndarray  # gamma[..., k, i, j] = Gamma^k_ij
    first: np.ndarray  # first[..., i, j, l] = Gamma_{ij,l}


def _connection(X1, X2, signs, tol) -> _Connection:
    G = _metric(X1, signs, tol)
    Ginv = np.linalg.inv(G)
    t = np.einsum("...kia,a,...ja->...kij", X2, signs, X1)
    dG = t + np.swapaxes(t, -1, -2)
    # first kind: Gamma_{ij,l} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    first = 0.5 * (dG + np.swapaxes(dG, -3, -2) - np.moveaxis(dG, -3, -1))
    gamma = np.einsum("...kl,...ijl->...kij", Ginv, first)
    return _Connection(G, Ginv, dG, gamma, first)


def christoffel(imm: Immersion, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``Gamma[..., k, i, j] = Gamma^k_ij`` of the induced metric."""
    signs = imm.space_form.signs
    J = imm.jet(np.asarray(u, dtype=float), 2)
    return _connection(_derivative_stack(J, 1), _derivative_stack(J, 2), signs, tol).gamma


def riemann_tensor(imm: Immersion, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``R[..., l, k, i, j]`` with ``R(d_i, d_j) d_k = R^l_kij d_l``."""
    signs = imm.space_form.signs
    J = imm.jet(np.asarray(u, dtype=float), 3)
    X1, X2, X3 = (_derivative_stack(J, k) for k in (1, 2, 3))
    return _riemann(X1, X2, X3, signs, tol)[0]


def _riemann(X1, X2, X3, signs, tol):
    con = _connection(X1, X2, signs, tol)
    # ddG[..., m, k, i, j] = d_m d_k g_ij
    a = np.einsum("...ikma,a,...ja->...mkij", X3, signs, X1)
    b = np.einsum("...ika,a,...jma->...mkij", X2, signs, X2)
    ddG = a + np.swapaxes(a, -1, -2) + b + np.swapaxes(b, -1, -2)
    # dfirst[..., m, i, j, l] = d_m Gamma_{ij,l}
    dfirst = 0.5 * (ddG + np.swapaxes(ddG, -3, -2) - np.moveaxis(ddG, -3, -1))
    first = con.first
    dGinv = -np.einsum("...ka,...mab,...bl->...mkl", con.Ginv, con.dG, con.Ginv)
    # dgamma[..., m, k, i, j] = d_m Gamma^k_ij
    dgamma = np.einsum("...mkl,...ijl->...mkij", dGinv, first) + np.einsum(
        "...kl,...mijl->...mkij", con.Ginv, dfirst
    )
    g = con.gamma
    # R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    t1 = np.einsum("...iljk->...lkij", dgamma)
    t2 = np.einsum("...jlik->...lkij", dgamma)
    t3 = np.einsum("...lim,...mjk->...lkij", g, g)
    t4 = np.einsum("...ljm,...mik->...lkij", g, g)
    return t1 - t2 + t3 - t4, con


@dataclass
class GaussCodazzi:
    codazzi: np.ndarray
    gauss: np.ndarray
    weingarten: np.ndarray


def gauss_codazzi_residuals(
    imm: Immersion, u, basis: Sequence[tuple[int, int, int]] | None = None, tol: float = DEFAULT_TOL
) -> GaussCodazzi:
    """Max defects of the Codazzi and Gauss equations at ``u``.

    ``basis`` optionally restricts the coordinate triples ``(i, j, k)`` that
    enter both maxima.  The Gauss side uses the intrinsic curvature from
    metric derivatives; the Codazzi side differentiates the normal through
    its defining linear conditions.
    """
    u = np.asarray(u, dtype=float)
    signs = imm.space_form.signs
    c = imm.space_form.curvature
    n = imm.n
    J = imm.jet(u, 3)
    x0 = J.value
    X1, X2, X3 = (_derivative_stack(J, k) for k in (1, 2, 3))
    R, con = _riemann(X1, X2, X3, signs, tol)
    xi, eps = _normal(x0, X1, signs, imm.orientation, tol)
    b = np.einsum("...ija,a,...a->...ij", X2, signs, xi)  # <A d_i, d_j>
    A = np.einsum("...kl,...lj->...kj", con.Ginv, b)
    G = con.G
    e = eps[..., None, None, None, None]
    delta = np.eye(n)
    # RHS^l_kij = c(g_jk delta^l_i - g_ik delta^l_j) + eps(<A d_j, d_k> A^l_i - <A d_i, d_k> A^l_j)
    rhs = c * (
        np.einsum("...jk,li->...lkij", G, delta) - np.einsum("...ik,lj->...lkij", G, delta)
    ) + e * (np.einsum("...jk,...li->...lkij", b, A) - np.einsum("...ik,...lj->...lkij", b, A))
    gauss = np.abs(R - rhs)

    # d_m xi from <d_m xi, x_i> = -b_im, <d_m xi, x> = -<xi, x_m>, <d_m xi, xi> = 0
    F = np.concatenate([X1, x0[..., None, :], xi[..., None, :]], axis=-2) * signs
    rhs_xi = np.concatenate(
        [-np.swapaxes(b, -1, -2), -_inner(xi[..., None, :], X1, signs)[..., None, :], np.zeros(b.shape[:-2] + (1, n))],
        axis=-2,
    )  # (..., N, n): column m
    dxi = np.swapaxes(np.linalg.solve(F, rhs_xi), -1, -2)  # (..., m, N)
    db = np.einsum("...ijma,a,...a->...mij", X3, signs, xi) + np.einsum(
        "...ija,a,...ma->...mij", X2, signs, dxi
    )
    gam = con.gamma
    nab = db - np.einsum("...kmi,...kj->...mij", gam, b) - np.einsum("...kmj,...ik->...mij", gam, b)
    codazzi = np.abs(nab - np.swapaxes(nab, -3, -2))  # [m, i, j] vs [i, m, j]

    # Weingarten: tangential part of d_i xi equals -A d_i
    tang = np.einsum("...kl,...ma,a,...la->...mk", con.Ginv, dxi, signs, X1)
    weingarten = np.abs(tang + np.swapaxes(A, -1, -2)).max(axis=(-1, -2))

    if basis is not None:
        idx = np.array(basis)
        codazzi = codazzi[..., idx[:, 0], idx[:, 1], idx[:, 2]]
        gauss = np.stack([gauss[..., :, k, i, j] for i, j, k in basis], axis=-1)
    cod = codazzi.reshape(codazzi.shape[: u.ndim - 1] + (-1,)).max(axis=-1)
    gau = gauss.reshape(gauss.shape[: u.ndim - 1] + (-1,)).max(axis=-1)
    return GaussCodazzi(cod, gau, weingarten)


# -- finite differences ------------------------------------------------------
_W1 = {-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}  # /(12 h)
_W2 = {-2: -1.0, -1: 16.0, 0: -30.0, 1: 16.0, 2: -1.0}  # /(12 h^2)


def fd_step(u) -> np.ndarray:
    return 1e-3 * (1.0 + np.abs(np.asarray(u, dtype=float)))


def _stencil(m):
    """Offsets (in units of h) for gradient, pure and mixed second derivatives."""
    offs = [np.zeros(m)]
    for i in range(m):
        for s in (-2, -1, 1, 2):
            o = np.zeros(m)
            o[i] = s
            offs.append(o)
    for i in range(m):
        for j in range(i + 1, m):
            for a in (-2, -1, 1, 2):
                for b in (-2, -1, 1, 2):
                    o = np.zeros(m)
                    o[i] = a
                    o[j] = b
                    offs.append(o)
    return np.array(offs)


def _combine(vals, h, m):
    """Gradient and Hessian from stencil values; vals[..., s] in _stencil order."""
    f0 = vals[..., 0]
    grad = np.zeros(vals.shape[:-1] + (m,))
    hess = np.zeros(vals.shape[:-1] + (m, m))
    pos = 1
    for i in range(m):
        fv = {s: vals[..., pos + k] for k, s in enumerate((-2, -1, 1, 2))}
        pos += 4
        grad[..., i] = sum(_W1[s] * fv[s] for s in fv) / (12 * h[..., i])
        fv[0] = f0
        hess[..., i, i] = sum(_W2[s] * fv[s] for s in fv) / (12 * h[..., i] ** 2)
    for i in range(m):
        for j in range(i + 1, m):
            acc = 0.0
            for a in (-2, -1, 1, 2):
                for b in (-2, -1, 1, 2):
                    acc = acc + _W1[a] * _W1[b] * vals[..., pos]
                    pos += 1
            hess[..., i, j] = hess[..., j, i] = acc / (144 * h[..., i] * h[..., j])
    return grad, hess


def fd_grad_hess(f: Callable, u, domain: Immersion | None = None, h=None):
    """Gradient and Hessian of a batched scalar field by 5-point stencils.

    One Richardson level combines steps ``h`` and ``h/2``.  When ``domain`` is
    given, a stencil leaving its chart box raises :class:`DomainError`.
    """
    u = np.asarray(u, dtype=float)
    m = u.shape[-1]
    h = fd_step(u) if h is None else np.broadcast_to(np.asarray(h, dtype=float), u.shape)
    if domain is not None:
        flat = u.reshape(-1, m)
        hf = np.broadcast_to(h, u.shape).reshape(-1, m)
        if np.any(flat - 2 * hf < domain.lower) or np.any(flat + 2 * hf > domain.upper):
            raise DomainError("finite-difference stencil exits the chart domain")
    offs = _stencil(m)
    results = []
    for step in (h, 0.5 * h):
        pts = u[..., None, :] + offs * step[..., None, :]
        vals = np.asarray(f(pts))
        results.append(_combine(vals, step, m))
    (g1, h1), (g2, h2) = results
    return (16 * g2 - g1) / 15, (16 * h2 - h1) / 15


def laplace_beltrami(imm: Immersion, f: Callable, u, tol: float = DEFAULT_TOL, h=None):
    """``g^{ij}(d_i d_j f - Gamma^k_ij d_k f)`` (trace of the Hessian).

    ``f`` maps chart points ``(..., m)`` to values ``(...)``.
    """
    u = np.asarray(u, dtype=float)
    grad, hess = fd_grad_hess(f, u, imm, h)
    signs = imm.space_form.signs
    J = imm.jet(u, 2)
    con = _connection(_derivative_stack(J, 1), _derivative_stack(J, 2), signs, tol)
    cov = hess - np.einsum("...kij,...k->...ij", con.gamma, grad)
    return np.einsum("...ij,...ij->...", con.Ginv, cov)


def gradient(imm: Immersion, f: Callable, u, tol: float = DEFAULT_TOL, h=None):
    """Contravariant gradient ``g^{ij} d_j f`` as chart components."""
    u = np.asarray(u, dtype=float)
    grad, _ = fd_grad_hess(f, u, imm, h)
    G = first_fundamental_form(imm, u, tol)
    return np.linalg.solve(G, grad[..., None])[..., 0]


def quadric_residual(imm: Immersion, u) -> np.ndarray:
    x = imm(u)
    return _inner(x, x, imm.space_form.signs) - 1.0 / imm.space_form.curvature
