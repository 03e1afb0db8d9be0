"""Finitely supported measures on the state space with a fixed barycenter,
the marginal-product construction, and the isometry parametrization of all
decompositions of a given state.

Only finitely supported measures are represented; every decomposition is a
coarse-graining of a pure-state refinement, and every pure refinement comes
from an isometry applied to the spectral decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import BipartiteSpace, BipartiteState, restrict_first, restrict_second, validate_density
from .errors import BadPartition, DimensionMismatch, RankTooSmall
from .linalg import as_matrix, kron

WEIGHT_SUM_ATOL = 1e-10
BARYCENTER_ATOL = 1e-8
# Groups whose weight falls below this are dropped and the rest renormalized.
ZERO_WEIGHT_TOL = 1e-14
# Relative eigenvalue threshold defining the rank of a decomposed state.
RANK_REL_TOL = 1e-12

Partition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Ensemble:
    """Weights and member density matrices with a declared barycenter."""

    space: BipartiteSpace
    weights: np.ndarray
    members: tuple[np.ndarray, ...]
    barycenter: BipartiteState

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if w.ndim != 1 or w.size == 0:
            raise DimensionMismatch("weights must be a non-empty 1-D sequence")
        if np.any(w < -WEIGHT_SUM_ATOL):
            raise DimensionMismatch("weights must be nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_ATOL:
            raise DimensionMismatch(f"weights sum to {w.sum()}, expected 1")
        if len(self.members) != w.size:
            raise DimensionMismatch("weights and members must have equal length")
        members = tuple(validate_density(m, self.space.dim, f"member {i}")
                        for i, m in enumerate(self.members))
        acc = sum(wi * mi for wi, mi in zip(w, members))
        resid = float(np.linalg.norm(acc - self.barycenter.rho))
        if resid > BARYCENTER_ATOL:
            raise DimensionMismatch(f"barycenter residual {resid:.3e} > {BARYCENTER_ATOL:.1e}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class ProductEnsemble:
    """Weights plus per-member marginal pairs (the image under the
    marginal-product construction)."""

    space: BipartiteSpace
    weights: np.ndarray
    first_marginals: tuple[np.ndarray, ...]
    second_marginals: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if abs(w.sum() - 1.0) > WEIGHT_SUM_ATOL:
            raise DimensionMismatch(f"weights sum to {w.sum()}, expected 1")
        firsts = tuple(validate_density(m, self.space.d1, f"first marginal {i}")
                       for i, m in enumerate(self.first_marginals))
        seconds = tuple(validate_density(m, self.space.d2, f"second marginal {i}")
                        for i, m in enumerate(self.second_marginals))
        if len(firsts) != w.size or len(seconds) != w.size:
            raise DimensionMismatch("marginal lists must match weights length")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "first_marginals", firsts)
        object.__setattr__(self, "second_marginals", seconds)


def boxtimes(e: Ensemble) -> ProductEnsemble:
    """Replace each member by the pair of its marginals, keeping weights."""
    firsts, seconds = [], []
    for m in e.members:
        s = BipartiteState(e.space, m)
        firsts.append(restrict_first(s))
        seconds.append(restrict_second(s))
    return ProductEnsemble(e.space, e.weights.copy(), tuple(firsts), tuple(seconds))


def boxtimes_barycenter(pe: ProductEnsemble) -> BipartiteState:
    """Barycenter sum_i w_i (sigma_i (x) tau_i); always separable."""
    dim = pe.space.dim
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for w, s, t in zip(pe.weights, pe.first_marginals, pe.second_marginals):
        acc += w * kron(s, t)
    return BipartiteState(pe.space, acc)


def evaluate_boxtimes(pe: ProductEnsemble, a: np.ndarray) -> complex:
    """sum_i w_i Tr[(sigma_i (x) tau_i) A] without forming the barycenter."""
    a = as_matrix(a, "A")
    d1, d2 = pe.space.d1, pe.space.d2
    if a.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatch(f"observable shape {a.shape} != {(d1 * d2, d1 * d2)}")
    a4 = a.reshape(d1, d2, d1, d2)
    total = 0.0 + 0.0j
    for w, s, t in zip(pe.weights, pe.first_marginals, pe.second_marginals):
        total += w * np.einsum("ab,cd,bdac->", s, t, a4)
    return complex(total)


def normalize_partition(partition, m: int) -> Partition:
    """Validate that the groups cover range(m) disjointly."""
    groups = tuple(tuple(int(j) for j in g) for g in partition)
    seen = [j for g in groups for j in g]
    if sorted(seen) != list(range(m)):
        raise BadPartition(f"groups must partition 0..{m - 1}, got {groups}")
    if any(len(g) == 0 for g in groups):
        raise BadPartition("empty group in partition")
    return groups


def singleton_partition(m: int) -> Partition:
    return tuple((j,) for j in range(m))


def hermitian_from_params(params: np.ndarray, m: int) -> np.ndarray:
    """Hermitian m x m matrix from m^2 real coordinates (diagonal first,
    then upper-triangle real and imaginary parts)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (m * m,):
        raise DimensionMismatch(f"expected {m * m} parameters, got {params.shape}")
    h = np.zeros((m, m), dtype=np.complex128)
    h[np.diag_indices(m)] = params[:m]
    k = m * (m - 1) // 2
    if k:
        iu = np.triu_indices(m, 1)
        upper = params[m:m + k] + 1j * params[m + k:]
        h[iu] = upper
        h[(iu[1], iu[0])] = upper.conj()
    return h


def params_from_hermitian(h: np.ndarray) -> np.ndarray:
    """Inverse of hermitian_from_params."""
    h = as_matrix(h, "h")
    m = h.shape[0]
    iu = np.triu_indices(m, 1)
    return np.concatenate([h.diagonal().real, h[iu].real, h[iu].imag])


def embed_params(params: np.ndarray, m_from: int, m_to: int) -> np.ndarray:
    """Pad the generator with zero rows/columns so the induced ensemble is
    unchanged when the cardinality grows from m_from to m_to."""
    if m_to < m_from:
        raise DimensionMismatch(f"cannot embed cardinality {m_from} into {m_to}")
    h = hermitian_from_params(np.asarray(params, dtype=float), m_from)
    big = np.zeros((m_to, m_to), dtype=np.complex128)
    big[:m_from, :m_from] = h
    return params_from_hermitian(big)


def embed_partition(partition, m_from: int, m_to: int) -> Partition:
    """Extend a partition of range(m_from) with singleton groups."""
    groups = normalize_partition(partition, m_from)
    return groups + tuple((j,) for j in range(m_from, m_to))


def expm_antihermitian(params: np.ndarray, m: int) -> np.ndarray:
    """m x m unitary exp(K) from the m^2 real coordinates of an
    anti-Hermitian K = iH."""
    h = hermitian_from_params(params, m)
    w, q = np.linalg.eigh(h)
    return (q * np.exp(1j * w)) @ q.conj().T


def state_spectral_data(rho: BipartiteState) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors above the relative rank threshold,
    descending by weight."""
    w, v = np.linalg.eigh(rho.rho)
    keep = w > max(w[-1], 0.0) * RANK_REL_TOL
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    return w, v


def ensemble_from_unitary(rho: BipartiteState, u: np.ndarray, partition) -> Ensemble:
    """Ensemble of rho from an m x m unitary applied to its spectral
    decomposition, coarse-grained by the index partition.

    Unnormalized vectors phi_j = sum_k conj(U[j, k]) sqrt(p_k) psi_k; each
    group G becomes one member with weight sum_{j in G} <phi_j|phi_j>.
    """
    u = as_matrix(u, "U")
    m = u.shape[0]
    if u.shape != (m, m):
        raise DimensionMismatch("U must be square")
    p, psi = state_spectral_data(rho)
    r = p.size
    if m < r:
        raise RankTooSmall(f"cardinality {m} below rank {r}")
    groups = normalize_partition(partition, m)
    phi = psi @ (np.sqrt(p)[:, None] * u[:, :r].conj().T)  # (dim, m)
    weights, members = [], []
    for g in groups:
        block = phi[:, list(g)]
        lam = float(np.einsum("ij,ij->", block, block.conj()).real)
        if lam < ZERO_WEIGHT_TOL:
            continue
        x = block @ block.conj().T
        members.append((x + x.conj().T) / (2.0 * lam))
        weights.append(lam)
    if not weights:
        raise BadPartition("all groups carried zero weight")
    w = np.asarray(weights)
    w /= w.sum()
    return Ensemble(rho.space, w, tuple(members), rho)


def hjw_ensemble(rho: BipartiteState, isometry_params: np.ndarray, m: int, partition) -> Ensemble:
    """Ensemble of rho indexed by isometry parameters (anti-Hermitian
    exponential coordinates of an m x m unitary) and a coarse-graining
    partition of the m pure pieces."""
    p, _ = state_spectral_data(rho)
    if m < p.size:
        raise RankTooSmall(f"cardinality {m} below rank {p.size}")
    u = expm_antihermitian(np.asarray(isometry_params, dtype=float), m)
    return ensemble_from_unitary(rho, u, partition)
