"""Signature-aware linear algebra for small dense real matrices.

Everything here is a pure function of its inputs.  The eigen-structure code
works from ``numpy.linalg.eigvals`` and pivoted elimination ranks; no
iterative solver state is kept between calls.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AmbiguityError, DimensionError, SelfAdjointnessError, SignatureError

DEFAULT_TOL = 1e-8

# Ambiguity band (multiplicative) around a clustering radius or rank threshold.
_BAND = 3.0


@dataclass(frozen=True)
class Signature:
    dim: int
    index: int

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError(f"dimension must be positive, got {self.dim}")
        if not 0 <= self.index <= self.dim:
            raise DimensionError(f"index {self.index} outside [0, {self.dim}]")

    def metric(self) -> np.ndarray:
        """Canonical diagonal metric, minus signs first."""
        return np.diag([-1.0] * self.index + [1.0] * (self.dim - self.index))


def signature_of(g, tol: float = DEFAULT_TOL) -> Signature:
    g = np.asarray(g, dtype=float)
    w = np.linalg.eigvalsh(0.5 * (g + g.T))
    scale = max(np.abs(w).max(initial=0.0), 1.0)
    if np.any(np.abs(w) <= tol * scale):
        raise SignatureError("metric is degenerate; signature undefined")
    return Signature(g.shape[0], int(np.sum(w < 0)))


@dataclass(frozen=True)
class MetricMatrix:
    """Symmetric nondegenerate bilinear form, validated on construction."""

    entries: np.ndarray
    tolerance: float = DEFAULT_TOL
    signature: Signature = field(init=False)

    def __post_init__(self):
        g = np.array(self.entries, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionError(f"metric must be square, got shape {g.shape}")
        norm = max(np.abs(g).max(initial=0.0), 1.0)
        if np.abs(g - g.T).max(initial=0.0) > self.tolerance * norm:
            raise SelfAdjointnessError("metric matrix is not symmetric")
        if abs(np.linalg.det(g)) <= self.tolerance * norm ** g.shape[0]:
            raise SignatureError("metric matrix is degenerate")
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)
        object.__setattr__(self, "signature", signature_of(g, self.tolerance))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_lorentzian(self) -> bool:
        return self.signature.index == 1

    @classmethod
    def of(cls, g, tol: float = DEFAULT_TOL) -> "MetricMatrix":
        return g if isinstance(g, cls) else cls(np.asarray(g, dtype=float), tol)


def _entries(g) -> np.ndarray:
    return g.entries if isinstance(g, MetricMatrix) else np.asarray(g, dtype=float)


def indefinite_inner(u, v, g) -> float:
    """Return ``u^T g v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    g = _entries(g)
    if u.shape[-1] != g.shape[0] or v.shape[-1] != g.shape[0]:
        raise DimensionError(f"vector dims {u.shape[-1]}, {v.shape[-1]} vs metric {g.shape[0]}")
    return np.einsum("...i,ij,...j->...", u, g, v)


class CausalCharacter(str, enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


def causal_character(v, g, tol: float = DEFAULT_TOL) -> CausalCharacter:
    v = np.asarray(v, dtype=float)
    norm2 = float(v @ v)
    if norm2 == 0.0:
        raise DimensionError("causal character of the zero vector is undefined")
    q = float(indefinite_inner(v, v, g))
    if q < -tol * norm2:
        return CausalCharacter.TIMELIKE
    if q > tol * norm2:
        return CausalCharacter.SPACELIKE
    return CausalCharacter.LIGHTLIKE


def char_poly(A) -> np.ndarray:
    """Monic characteristic polynomial ``det(tI - A)``, highest degree first.

    Faddeev-LeVerrier recursion; fine for the n <= 10 matrices used here.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"char_poly needs a square matrix, got {A.shape}")
    n = A.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    M = np.zeros_like(A)
    eye = np.eye(n)
    for k in range(1, n + 1):
        M = A @ M + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(A @ M) / k
    return coeffs


def numerical_rank(M, tol: float = DEFAULT_TOL, scale: float | None = None) -> int:
    """Rank by Gaussian elimination with complete pivoting.

    Pivots above ``tol * scale`` count (``scale`` defaults to the infinity
    norm).  A pivot within a factor of 3 of the threshold raises
    :class:`AmbiguityError` carrying both candidate ranks.
    """
    W = np.array(M, dtype=complex if np.iscomplexobj(M) else float)
    if W.ndim != 2:
        raise DimensionError("numerical_rank needs a matrix")
    if scale is None:
        scale = np.abs(W).sum(axis=1).max(initial=0.0)
    thr = tol * max(scale, np.finfo(float).tiny)
    rows, cols = W.shape
    rank = 0
    for k in range(min(rows, cols)):
        sub = np.abs(W[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        piv = sub[i, j]
        if thr / _BAND < piv < thr * _BAND:
            raise AmbiguityError(
                f"pivot {piv:.3e} within ambiguity band of threshold {thr:.3e}",
                candidates=[rank, rank + 1],
            )
        if piv <= thr:
            break
        i += k
        j += k
        W[[k, i]] = W[[i, k]]
        W[:, [k, j]] = W[:, [j, k]]
        W[k + 1:, k:] -= np.outer(W[k + 1:, k] / W[k, k], W[k, k:])
        rank += 1
    return rank


@dataclass(frozen=True)
class RealEigenvalue:
    value: float
    algebraic: int
    geometric: int
    jordan_blocks: tuple[int, ...]


@dataclass(frozen=True)
class ComplexPair:
    gamma: float
    tau: float
    multiplicity: int


@dataclass(frozen=True)
class ShapeSpectrum:
    real_eigenvalues: tuple[RealEigenvalue, ...]
    complex_pairs: tuple[ComplexPair, ...]
    form_tag: str
    char_poly: np.ndarray
    poly_residual: float

    @property
    def n(self) -> int:
        return len(self.char_poly) - 1

    @property
    def distinct_count(self) -> int:
        return len(self.real_eigenvalues) + 2 * len(self.complex_pairs)

    def values(self) -> list[float]:
        return [e.value for e in self.real_eigenvalues]

    def to_dict(self) -> dict:
        return {
            "real": [
                {
                    "value": e.value,
                    "algebraic": e.algebraic,
                    "geometric": e.geometric,
                    "jordan_blocks": list(e.jordan_blocks),
                }
                for e in self.real_eigenvalues
            ],
            "complex": [
                {"gamma": p.gamma, "tau": p.tau, "multiplicity": p.multiplicity}
                for p in self.complex_pairs
            ],
            "form": self.form_tag,
            "char_poly": [float(c) for c in self.char_poly],
            "poly_residual": self.poly_residual,
        }


def _cluster_radius(size: int, tol: float, scale: float) -> float:
    # A k-fold root of a Jordan block of size b splits like tol**(1/b); blocks
    # beyond 3 do not occur for Lorentzian shape operators.
    return scale * tol ** (1.0 / min(size, 3))


def _cluster_roots(roots: np.ndarray, tol: float, scale: float) -> list[list[int]]:
    clusters = [[i] for i in range(len(roots))]
    while len(clusters) > 1:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                d = min(abs(roots[i] - roots[j]) for i in clusters[a] for j in clusters[b])
                if best is None or d < best[0]:
                    best = (d, a, b)
        d, a, b = best
        r = _cluster_radius(len(clusters[a]) + len(clusters[b]), tol, scale)
        if r / _BAND < d < r * _BAND:
            merged = [c for k, c in enumerate(clusters) if k not in (a, b)] + [clusters[a] + clusters[b]]
            raise AmbiguityError(
                f"eigenvalue clusters at distance {d:.3e} near merge radius {r:.3e}",
                candidates=[
                    [[complex(roots[i]) for i in c] for c in clusters],
                    [[complex(roots[i]) for i in c] for c in merged],
                ],
            )
        if d > r:
            break
        clusters[a] = clusters[a] + clusters[b]
        del clusters[b]
    return clusters


def jordan_blocks(A, value: float, algebraic: int, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
    """Sizes of the Jordan blocks of ``A`` at a real eigenvalue, largest first."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    N = A - value * np.eye(n)
    scale = max(np.abs(A).sum(axis=1).max(initial=0.0), 1.0)
    ranks = [n]
    P = np.eye(n)
    target = n - algebraic
    for k in range(1, algebraic + 1):
        P = P @ N
        ranks.append(numerical_rank(P, tol, scale**k))
        if ranks[-1] <= target:
            break
    if ranks[-1] != target:
        raise AmbiguityError(
            f"rank sequence {ranks} never reaches n - alg = {target} at eigenvalue {value}",
            candidates=[ranks],
        )
    # number of blocks of size >= k is ranks[k-1] - ranks[k]
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))] + [0]
    blocks = []
    for k in range(1, len(at_least)):
        blocks += [k] * (at_least[k - 1] - at_least[k])
    return tuple(sorted(blocks, reverse=True))


def _form_from_structure(real, pairs) -> str:
    nontrivial = [b for e in real for b in e.jordan_blocks if b > 1]
    if pairs:
        if len(pairs) == 1 and pairs[0].multiplicity == 1 and not nontrivial:
            return "IV"
        return "Other"
    if not nontrivial:
        return "I"
    if nontrivial == [2]:
        return "II"
    if nontrivial == [3]:
        return "III"
    return "Other"


def eigen_structure(A, tol: float = DEFAULT_TOL) -> ShapeSpectrum:
    """Eigenvalues with algebraic/geometric multiplicities and a form tag.

    Roots are clustered by single linkage with a radius that grows with the
    cluster size (``scale * tol**(1/k)``, capped at k = 3) so that the
    splitting of Jordan blocks under round-off is absorbed.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"eigen_structure needs a square matrix, got {A.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = A.shape[0]
    scale = max(np.abs(A).sum(axis=1).max(initial=0.0), 1.0)
    roots = np.linalg.eigvals(A)
    clusters = _cluster_roots(roots, tol, scale)

    real, upper = [], []
    for c in clusters:
        mean = complex(np.mean(roots[c]))
        r = _cluster_radius(len(c), tol, scale)
        if abs(mean.imag) <= r:
            value = mean.real
            blocks = jordan_blocks(A, value, len(c), tol)
            real.append(RealEigenvalue(value, len(c), len(blocks), blocks))
        elif mean.imag > 0:
            upper.append(ComplexPair(mean.real, mean.imag, len(c)))
    real.sort(key=lambda e: e.value)
    upper.sort(key=lambda p: (p.gamma, p.tau))
    if sum(e.algebraic for e in real) + 2 * sum(p.multiplicity for p in upper) != n:
        raise AmbiguityError("complex clusters did not pair up into conjugates", candidates=[roots.tolist()])

    cp = char_poly(A)
    rebuilt = np.array([1.0])
    for e in real:
        for _ in range(e.algebraic):
            rebuilt = np.convolve(rebuilt, [1.0, -e.value])
    for p in upper:
        for _ in range(p.multiplicity):
            rebuilt = np.convolve(rebuilt, [1.0, -2 * p.gamma, p.gamma**2 + p.tau**2])
    residual = float(np.abs(rebuilt - cp).max() / (1.0 + np.abs(cp).max()))
    return ShapeSpectrum(tuple(real), tuple(upper), _form_from_structure(real, upper), cp, residual)


def self_adjointness_defect(A, g) -> float:
    A = np.asarray(A, dtype=float)
    g = _entries(g)
    return float(np.abs(g @ A - A.T @ g).max())


def classify_canonical_form(A, g, tol: float = DEFAULT_TOL) -> str:
    """Tag a Lorentzian shape operator with one of I, II, III, IV or Other.

    The decision uses only the Jordan structure, so any basis works.
    """
    A = np.asarray(A, dtype=float)
    gm = MetricMatrix.of(g, tol)
    if gm.dim != A.shape[0]:
        raise DimensionError(f"metric dim {gm.dim} vs operator dim {A.shape[0]}")
    if not gm.is_lorentzian:
        raise SignatureError(f"metric has index {gm.signature.index}, expected 1")
    scale = max(np.abs(gm.entries).max(), 1.0) * max(np.abs(A).max(), 1.0)
    defect = self_adjointness_defect(A, gm)
    if defect > tol * scale:
        raise SelfAdjointnessError(f"||gA - A^T g|| = {defect:.3e} exceeds {tol * scale:.3e}")
    return eigen_structure(A, tol).form_tag


def expand_multiplicities(eigenvalues: Sequence[float], multiplicities: Sequence[int]) -> list[float]:
    if len(eigenvalues) != len(multiplicities) or any(m < 1 for m in multiplicities):
        raise ValueError(f"inconsistent multiplicities {multiplicities} for eigenvalues {eigenvalues}")
    return [float(v) for v, m in zip(eigenvalues, multiplicities) for _ in range(m)]


def canonical_shape_matrix(
    form: str,
    diagonal: Sequence[float] = (),
    lead: float | None = None,
    gamma: float | None = None,
    tau: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(A, G)`` in the Lorentzian normal form ``form``.

    ``diagonal`` lists the diagonal eigenvalues (all n of them for form I,
    the trailing block otherwise); ``lead`` is the Jordan-block eigenvalue of
    forms II and III; ``gamma``/``tau`` give the complex block of form IV.
    """
    d = [float(v) for v in diagonal]
    if form == "I":
        n = len(d)
        if n < 1:
            raise ValueError("form I needs at least one eigenvalue")
        A = np.diag(d)
        G = np.eye(n)
        G[-1, -1] = -1.0
    elif form in ("II", "III"):
        if lead is None:
            raise ValueError(f"form {form} needs the Jordan-block eigenvalue 'lead'")
        b = 2 if form == "II" else 3
        n = b + len(d)
        A = np.diag([float(lead)] * b + d)
        A[np.arange(1, b), np.arange(b - 1)] = 1.0
        G = np.eye(n)
        G[:b, :b] = np.fliplr(np.eye(b))
    elif form == "IV":
        if gamma is None or tau is None or tau == 0:
            raise ValueError("form IV needs gamma and a nonzero tau")
        n = len(d) + 2
        A = np.zeros((n, n))
        A[: n - 2, : n - 2] = np.diag(d)
        A[n - 2:, n - 2:] = [[gamma, tau], [-tau, gamma]]
        G = np.eye(n)
        G[-1, -1] = -1.0
    else:
        raise ValueError(f"unknown form {form!r}")
    return A, G
