"""Normalized adjacency, Laplacian eigenbasis, LapPE and linear propagation.

Conventions: ``A_norm = D^{-1/2} (A + I) D^{-1/2}`` with ``D`` the degree
matrix of ``A + I`` (so isolated nodes are well defined), and
``L = I - A_norm``. The eigendecomposition is a dense symmetric solve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GraphInputError, InsufficientSpectrumError, NumericError
from .graph import Graph, adjacency_matrix

__all__ = [
    "SpectralBasis",
    "LapPE",
    "CutoffEigengapWarning",
    "ZERO_TOL",
    "CLUSTER_TOL",
    "normalized_adjacency",
    "normalized_laplacian",
    "spectral_decomposition",
    "select_modes",
    "lappe",
    "lappe_from_basis",
    "propagate",
    "projection_residual",
    "least_squares_residual",
]

ZERO_TOL = 1e-9
# eigenvalues closer than this are treated as one cluster at the LapPE cutoff
CLUSTER_TOL = 1e-6
_SIGN_TOL = 1e-9


class CutoffEigengapWarning(UserWarning):
    """The requested LapPE width splits a cluster of (near-)equal eigenvalues."""


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    trivial_count: int

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def nontrivial_count(self) -> int:
        return self.n - self.trivial_count


@dataclass(frozen=True, eq=False)
class LapPE:
    """Positional encoding with ``K`` columns.

    ``K`` may exceed the requested width when the cutoff fell inside an
    eigenvalue cluster; ``requested`` keeps the original value and
    ``eigengap_ok`` records whether the cutoff was clean.
    ``simple_spectrum`` is True when the retained eigenvalues are pairwise
    separated, i.e. every column is determined up to sign.
    """

    K: int
    coordinates: np.ndarray
    eigenvalues: np.ndarray
    requested: int
    eigengap_ok: bool

    @property
    def simple_spectrum(self) -> bool:
        return bool(np.all(np.diff(self.eigenvalues) > CLUSTER_TOL))


def normalized_adjacency(g: Graph) -> np.ndarray:
    a = adjacency_matrix(g) + np.eye(g.num_nodes)
    d = a.sum(axis=1)
    return a / np.sqrt(np.outer(d, d))


def normalized_laplacian(g: Graph) -> np.ndarray:
    return np.eye(g.num_nodes) - normalized_adjacency(g)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        idx = np.flatnonzero(np.abs(col) > _SIGN_TOL)
        if len(idx) and col[idx[0]] < 0:
            vecs[:, k] = -col
    return vecs


def spectral_decomposition(g: Graph) -> SpectralBasis:
    """Ascending eigenpairs of the normalized Laplacian.

    Each eigenvector is oriented so its first entry of magnitude above 1e-9
    is positive.
    """
    n = g.num_nodes
    if n == 0:
        return SpectralBasis(np.zeros(0), np.zeros((0, 0)), 0)
    lap = normalized_laplacian(g)
    try:
        vals, vecs = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise NumericError("symmetric eigensolver did not converge",
                           {"num_nodes": n, "num_edges": g.num_edges}) from exc
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise NumericError("eigensolver returned non-finite values",
                           {"num_nodes": n, "num_edges": g.num_edges})
    vecs = _fix_signs(np.array(vecs))
    tol = ZERO_TOL * max(1.0, float(vals[-1]))
    trivial = int(np.sum(vals < tol))
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return SpectralBasis(vals, vecs, trivial)


def select_modes(basis: SpectralBasis, K: int, extend: bool = True):
    """Column indices of the LapPE modes plus an eigengap flag.

    Trivial (near-zero) modes are skipped first. If the K-th retained
    eigenvalue sits in a cluster that continues past the cutoff, the
    selection is widened to the end of the cluster (``extend=True``) and a
    :class:`CutoffEigengapWarning` is issued.
    """
    if K < 1:
        raise GraphInputError(f"K must be positive, got {K}")
    start = basis.trivial_count
    if K > basis.nontrivial_count:
        raise InsufficientSpectrumError(
            f"requested {K} positional dims but only {basis.nontrivial_count} "
            "nontrivial Laplacian modes exist")
    stop = start + K
    vals = basis.eigenvalues
    gap_ok = True
    if stop < basis.n and vals[stop] - vals[stop - 1] <= CLUSTER_TOL:
        gap_ok = False
        if extend:
            while stop < basis.n and vals[stop] - vals[stop - 1] <= CLUSTER_TOL:
                stop += 1
        warnings.warn(
            f"LapPE cutoff K={K} splits an eigenvalue cluster near {vals[start + K - 1]:.6g}"
            + (f"; widened to {stop - start} columns" if extend else ""),
            CutoffEigengapWarning, stacklevel=3)
    return np.arange(start, stop), gap_ok


def lappe_from_basis(basis: SpectralBasis, K: int, extend: bool = True) -> LapPE:
    cols, gap_ok = select_modes(basis, K, extend=extend)
    return LapPE(
        K=len(cols),
        coordinates=np.array(basis.eigenvectors[:, cols]),
        eigenvalues=np.array(basis.eigenvalues[cols]),
        requested=K,
        eigengap_ok=gap_ok,
    )


def lappe(g: Graph, K: int, extend: bool = True) -> LapPE:
    """Lowest ``K`` nontrivial Laplacian eigenvectors as node coordinates."""
    return lappe_from_basis(spectral_decomposition(g), K, extend=extend)


def propagate(g: Graph, h0, T: int, adj: np.ndarray = None) -> np.ndarray:
    """Apply the normalized adjacency ``T`` times (weight-free linear GCN)."""
    h = np.asarray(h0, dtype=np.float64)
    if h.shape[0] != g.num_nodes:
        raise GraphInputError(f"H0 must have {g.num_nodes} rows, got {h.shape[0]}")
    if T < 0:
        raise GraphInputError("T must be nonnegative")
    a = normalized_adjacency(g) if adj is None else adj
    h = h.copy()
    for _ in range(T):
        h = a @ h
    return h


def projection_residual(y, basis: SpectralBasis, K: int, extend: bool = True) -> float:
    """Norm of the part of ``y`` outside the span of the LapPE modes."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (basis.n,):
        raise GraphInputError(f"y must be a vector of length {basis.n}")
    cols, _ = select_modes(basis, K, extend=extend)
    p = basis.eigenvectors[:, cols]
    return float(np.linalg.norm(y - p @ (p.T @ y)))


def least_squares_residual(design: np.ndarray, y) -> float:
    """Residual norm of the least-squares fit of ``y`` on the columns of ``design``."""
    y = np.asarray(y, dtype=np.float64)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(np.linalg.norm(y - design @ coef))
