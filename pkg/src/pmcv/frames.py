"""Moving frames ``E'(t) = M(t) E(t)`` preserving a constant Gram matrix.

A frame is stored as an ``(N, N)`` matrix whose rows are the ambient vectors
``E_1 .. E_N``.  With ambient metric ``eta`` the Gram matrix is
``F eta F^T``; it is preserved exactly when ``M T + T M^T = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import jets
from .errors import DegenerateMetricError, DomainError, SignatureError, StructureError

STRUCTURE_TOL = 1e-12
PROJECTION_TRIGGER = 1e-10
TAYLOR_ORDER = 6

Coefficient = Callable | float


def _coefficient_jet(f: Coefficient, t: jets.Jet) -> jets.Jet:
    value = f(t) if callable(f) else f
    if isinstance(value, jets.Jet):
        return value
    return jets.constant(np.broadcast_to(np.asarray(value, dtype=float), t.tail), t)


def _coefficient_value(f: Coefficient, t):
    value = f(t) if callable(f) else f
    return np.broadcast_to(np.asarray(value, dtype=float), np.shape(t))


@dataclass
class FrameODESpec:
    """``M(t) = sum_k f_k(t) P_k`` with constant patterns ``P_k``.

    Each pattern must be skew-adjoint with respect to ``gram_target`` on its
    own, so Gram preservation holds for arbitrary coefficient functions.
    ``labels`` names frame vectors in error messages (1-based by default).
    """

    gram_target: np.ndarray
    terms: list[tuple[str, Coefficient, np.ndarray]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.gram_target = np.asarray(self.gram_target, dtype=float)
        N = self.dimension
        if self.gram_target.shape != (N, N) or not np.allclose(self.gram_target, self.gram_target.T):
            raise StructureError("gram_target must be a symmetric square matrix")
        for name, _, P in self.terms:
            P = np.asarray(P, dtype=float)
            if P.shape != (N, N):
                raise StructureError(f"pattern for '{name}' has shape {P.shape}, expected {(N, N)}")
            D = P @ self.gram_target + self.gram_target @ P.T
            if np.abs(D).max() > STRUCTURE_TOL:
                i, j = np.unravel_index(np.argmax(np.abs(D)), D.shape)
                raise StructureError(
                    f"coefficient '{name}' breaks Gram preservation: "
                    f"<E_{i + 1}', E_{j + 1}> + <E_{i + 1}, E_{j + 1}'> = {D[i, j]:g} (should vanish)"
                )

    @property
    def dimension(self) -> int:
        return self.gram_target.shape[0]

    @classmethod
    def from_relations(
        cls,
        gram_target,
        relations: Mapping[tuple[int, int], Sequence[tuple[float, str]]],
        functions: Mapping[str, Coefficient],
        complete: bool = False,
        metadata: dict | None = None,
    ) -> "FrameODESpec":
        """Build a spec from ``E_i' = sum_j coeff_ij E_j`` (1-based indices).

        ``relations[(i, j)]`` lists ``(factor, name)`` pairs whose sum is the
        coefficient of ``E_j`` in ``E_i'``.  With ``complete=True`` the rows
        not mentioned are filled by skew-adjointness (the remaining free
        slots are zero), which is how span-only conditions are closed.
        """
        T = np.asarray(gram_target, dtype=float)
        N = T.shape[0]
        patterns: dict[str, np.ndarray] = {}
        rows: set[int] = set()
        for (i, j), contribs in relations.items():
            rows.add(i - 1)
            for factor, name in contribs:
                if name not in functions:
                    raise StructureError(f"relation for E_{i}' uses unknown coefficient '{name}'")
                patterns.setdefault(name, np.zeros((N, N)))[i - 1, j - 1] += factor
        if complete:
            Tinv = np.linalg.inv(T)
            given = np.zeros(N, dtype=bool)
            given[list(rows)] = True
            for name, P in patterns.items():
                omega = P @ T
                full = np.where(given[:, None], omega, 0.0)
                full = full + np.where(~given[:, None] & given[None, :], -omega.T, 0.0)
                patterns[name] = full @ Tinv
        terms = [(name, functions[name], P) for name, P in patterns.items()]
        return cls(T, terms, dict(metadata or {}))

    def matrix(self, t) -> np.ndarray:
        """``M(t)``; ``t`` may be a float or an array (batch dims lead)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (self.dimension,) * 2)
        for _, f, P in self.terms:
            out = out + _coefficient_value(f, t)[..., None, None] * P
        return out

    def taylor(self, t0, order: int) -> np.ndarray:
        """Taylor coefficients ``m_k`` of ``M`` at ``t0``: shape ``(order+1, *t0.shape, N, N)``."""
        t0 = np.asarray(t0, dtype=float)
        tj = jets.variables(t0.reshape(-1, 1), order)[0]
        out = np.zeros((order + 1, t0.size, self.dimension, self.dimension))
        for _, f, P in self.terms:
            c = _coefficient_jet(f, tj).c  # (order+1, P)
            out += c[..., None, None] * P
        return out.reshape((order + 1,) + t0.shape + (self.dimension,) * 2)

    def is_constant(self) -> bool:
        return all(not callable(f) for _, f, _ in self.terms)


def initial_frame(gram_target, signs) -> np.ndarray:
    """Rows realizing ``gram_target`` from the standard basis of ``diag(signs)``.

    Supports Gram tables made of unit vectors and null pairs with
    ``<E_i, E_j> = 1``, as in the catalog examples.
    """
    T = np.asarray(gram_target, dtype=float)
    N = T.shape[0]
    timelike = [a for a in range(N) if signs[a] < 0]
    spacelike = [a for a in range(N) if signs[a] > 0]
    F = np.zeros((N, N))
    done = set()
    s = 1.0 / math.sqrt(2.0)
    for i in range(N):
        if i in done:
            continue
        off = [j for j in range(N) if j != i and T[i, j] != 0]
        if T[i, i] == 0:
            if len(off) != 1 or T[i, off[0]] != 1 or T[off[0], off[0]] != 0:
                raise SignatureError(f"unsupported Gram row for E_{i + 1}")
            j = off[0]
            if not timelike or not spacelike:
                raise SignatureError("null pair needs both a timelike and a spacelike direction")
            a, b = timelike.pop(0), spacelike.pop(0)
            F[i, a], F[i, b] = s, s
            F[j, a], F[j, b] = -s, s
            done |= {i, j}
        else:
            if off or abs(T[i, i]) != 1:
                raise SignatureError(f"unsupported Gram row for E_{i + 1}")
            pool = timelike if T[i, i] < 0 else spacelike
            if not pool:
                raise SignatureError("Gram table signature does not match the ambient space")
            F[i, pool.pop(0)] = 1.0
            done.add(i)
    return F


def gram(F, signs) -> np.ndarray:
    return np.einsum("...ia,a,...ja->...ij", F, signs, F)


def project_frame(F, target, signs, max_iter: int = 8) -> np.ndarray:
    """Newton correction ``F <- F - 1/2 (Gram(F) - T) T^{-1} F`` until exact."""
    Tinv = np.linalg.inv(target)
    for _ in range(max_iter):
        S = gram(F, signs) - target
        if np.abs(S).max() < 1e-15:
            return F
        F = F - 0.5 * S @ Tinv @ F
    S = gram(F, signs) - target
    if not np.all(np.isfinite(F)) or np.abs(S).max() > 1e-12:
        raise DegenerateMetricError("Gram projection did not converge; frame is close to degenerate")
    return F


@dataclass
class FrameField:
    """RK4 samples of a frame with local Taylor dense output.

    ``taylor[k, j]`` is the j-th Taylor coefficient of the frame at node
    ``t_grid[k]``, obtained from the ODE itself; evaluation and jets expand
    around the nearest node, so derivatives of any order are consistent.
    """

    t_grid: np.ndarray
    frames: np.ndarray
    gram_target: np.ndarray
    signs: np.ndarray
    spec: FrameODESpec
    taylor: np.ndarray
    drift: float
    projections: int = 0

    @property
    def t_range(self) -> tuple[float, float]:
        return float(self.t_grid[0]), float(self.t_grid[-1])

    def _node(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_range
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainError(f"frame requested outside its integration interval [{lo}, {hi}]")
        h = (hi - lo) / (len(self.t_grid) - 1)
        k = np.clip(np.rint((t - lo) / h).astype(int), 0, len(self.t_grid) - 1)
        return k, t - self.t_grid[k]

    def local_coefficients(self, t, order: int) -> np.ndarray:
        """Taylor coefficients at ``t`` itself, shape ``(order+1, *t.shape, N, N)``."""
        k, s = self._node(t)
        e = self.taylor[k]  # (*t.shape, J+1, N, N)
        J = e.shape[-3] - 1
        out = []
        for r in range(order + 1):
            acc = 0.0
            for j in range(J, r - 1, -1):
                acc = acc * s[..., None, None] + math.comb(j, r) * e[..., j, :, :]
            out.append(acc)
        return np.stack(out)

    def __call__(self, t) -> np.ndarray:
        return self.local_coefficients(t, 0)[0]

    def jet(self, t: jets.Jet) -> jets.Jet:
        """Frame composed with a chart-coordinate jet; tail ``(*batch, N, N)``."""
        coeffs = self.local_coefficients(t.value, t.order)
        var = _coordinate_variable(t)
        if var is None:
            return t[..., None, None].compose(list(coeffs))
        # t is a bare chart coordinate: the frame's Taylor coefficients are the jet
        sp = t.space
        c = np.zeros((sp.size,) + coeffs.shape[1:])
        for k in range(t.order + 1):
            alpha = [0] * t.nvars
            alpha[var] = k
            c[sp.index[tuple(alpha)]] = coeffs[k]
        return jets.Jet(c, t.nvars, t.order, t.base_point)

    def gram_drift(self) -> float:
        return float(np.abs(gram(self.frames, self.signs) - self.gram_target).max())


def _coordinate_variable(t: jets.Jet) -> int | None:
    """Index ``i`` if ``t`` is the identity jet of chart variable ``i``."""
    if t.order == 0:
        return 0
    lin = t.c[1 : 1 + t.nvars]
    if np.any(t.c[1 + t.nvars :] != 0):
        return None
    hits = [i for i in range(t.nvars) if np.all(lin[i] == 1.0)]
    if len(hits) != 1 or np.any(np.delete(lin, hits[0], axis=0) != 0):
        return None
    return hits[0]


def _node_taylor(spec: FrameODESpec, t, F, order: int) -> np.ndarray:
    m = spec.taylor(t, order)  # (order+1, K, N, N)
    e = [F]
    for k in range(order):
        acc = sum(m[i] @ e[k - i] for i in range(k + 1))
        e.append(acc / (k + 1))
    return np.stack(e, axis=1)  # (K, order+1, N, N)


def integrate_frame(
    spec: FrameODESpec,
    t_range: tuple[float, float],
    initial,
    signs,
    step: float = 1e-3,
    project: bool = True,
) -> FrameField:
    """Classical RK4 with Gram projection whenever drift exceeds 1e-10."""
    F = np.asarray(initial, dtype=float).copy()
    signs = np.asarray(signs, dtype=float)
    T = spec.gram_target
    d0 = np.abs(gram(F, signs) - T).max()
    if d0 > 1e-12:
        raise StructureError(f"initial frame violates the Gram table (defect {d0:g})")
    a, b = map(float, t_range)
    if not b > a:
        raise DomainError("t_range must be increasing")
    K = max(1, math.ceil((b - a) / step - 1e-9))
    h = (b - a) / K
    ts = a + h * np.arange(K + 1)
    frames = np.empty((K + 1,) + F.shape)
    frames[0] = F
    constant = spec.is_constant()
    M0 = spec.matrix(a) if constant else None
    drift = d0
    projections = 0
    for k in range(K):
        t = ts[k]
        if constant:
            Ma = Mb = Mc = M0
        else:
            Ma, Mb, Mc = spec.matrix(t), spec.matrix(t + 0.5 * h), spec.matrix(t + h)
        k1 = Ma @ F
        k2 = Mb @ (F + 0.5 * h * k1)
        k3 = Mb @ (F + 0.5 * h * k2)
        k4 = Mc @ (F + h * k3)
        F = F + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        d = np.abs(gram(F, signs) - T).max()
        if project and d > PROJECTION_TRIGGER:
            F = project_frame(F, T, signs)
            projections += 1
            d = np.abs(gram(F, signs) - T).max()
        drift = max(drift, d)
        frames[k + 1] = F
    taylor = _node_taylor(spec, ts, frames, TAYLOR_ORDER)
    return FrameField(ts, frames, T, signs, spec, taylor, float(drift), projections)
