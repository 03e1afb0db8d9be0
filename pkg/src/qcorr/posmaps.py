"""Positive unital maps on the first tensor factor, stored via Choi
matrices, together with the partial-transpose criterion and the
Kadison-type defect.

Choi convention: C = sum_{kl} E_kl (x) alpha(E_kl) in the matrix-unit
basis of M_d, so C reshaped to (d, d, d, d) has entries
C4[k, a, l, b] = <a| alpha(E_kl) |b>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bipartite import BipartiteState
from .errors import DimensionMismatch, MapNotUnital
from .linalg import as_matrix, dagger, hermitian_eigendecompose

UNITAL_ATOL = 1e-10
POSITIVITY_ATOL = 1e-9


@dataclass(frozen=True)
class PositiveMapSpec:
    """Linear map on M_d given by its Choi matrix plus verification flags."""

    d: int
    choi: np.ndarray
    name: str = ""
    unital_checked: bool = False
    positive_checked: bool = False

    def __post_init__(self):
        choi = as_matrix(self.choi, "choi").copy()
        n = self.d * self.d
        if choi.shape != (n, n):
            raise DimensionMismatch(f"choi shape {choi.shape} != ({n}, {n})")
        choi.setflags(write=False)
        object.__setattr__(self, "choi", choi)

    @property
    def choi4(self) -> np.ndarray:
        return self.choi.reshape(self.d, self.d, self.d, self.d)


def map_from_function(d: int, fn: Callable[[np.ndarray], np.ndarray], name: str = "",
                      unital_checked: bool = False, positive_checked: bool = False) -> PositiveMapSpec:
    """Build the Choi matrix of x -> fn(x) by evaluating fn on matrix units."""
    c = np.zeros((d * d, d * d), dtype=np.complex128)
    for k in range(d):
        for l in range(d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[k, l] = 1.0
            c[k * d:(k + 1) * d, l * d:(l + 1) * d] = as_matrix(fn(e), "fn(E_kl)")
    return PositiveMapSpec(d, c, name, unital_checked, positive_checked)


def apply_map(alpha: PositiveMapSpec, x: np.ndarray) -> np.ndarray:
    """alpha(x) reconstructed from the Choi matrix."""
    x = as_matrix(x, "x")
    if x.shape != (alpha.d, alpha.d):
        raise DimensionMismatch(f"input shape {x.shape} != ({alpha.d}, {alpha.d})")
    return np.einsum("kl,kalb->ab", x, alpha.choi4)


def apply_tensor_id(alpha: PositiveMapSpec, s: BipartiteState) -> np.ndarray:
    """(alpha (x) id)(rho) acting on the first factor of a bipartite state."""
    d1, d2 = s.space.d1, s.space.d2
    if alpha.d != d1:
        raise DimensionMismatch(f"map dimension {alpha.d} != first factor {d1}")
    r4 = s.rho.reshape(d1, d2, d1, d2)
    out = np.einsum("kalb,kilj->aibj", alpha.choi4, r4)
    return out.reshape(d1 * d2, d1 * d2)


def identity_map(d: int) -> PositiveMapSpec:
    return map_from_function(d, lambda x: x, "identity", True, True)


def transpose_map(d: int) -> PositiveMapSpec:
    return map_from_function(d, lambda x: x.T, "transpose", True, True)


def reduction_map(d: int) -> PositiveMapSpec:
    """x -> (Tr(x) 1 - x) / (d - 1) for d > 1 (unital form); Tr(x) 1 - x at d=2
    coincides with the unnormalized reduction map."""
    if d < 2:
        raise DimensionMismatch("reduction map needs d >= 2")
    eye = np.eye(d, dtype=np.complex128)
    return map_from_function(d, lambda x: (np.trace(x) * eye - x) / (d - 1), "reduction", True, True)


def depolarizing_map(d: int, lam: float) -> PositiveMapSpec:
    """x -> lam x + (1 - lam) Tr(x) 1/d; positive and unital for lam in [0, 1]."""
    eye = np.eye(d, dtype=np.complex128)
    return map_from_function(
        d, lambda x: lam * x + (1.0 - lam) * np.trace(x) * eye / d,
        f"depolarizing({lam:g})", True, 0.0 <= lam <= 1.0)


def convex_combination(a: PositiveMapSpec, b: PositiveMapSpec, t: float, name: str = "") -> PositiveMapSpec:
    if a.d != b.d:
        raise DimensionMismatch("convex combination needs equal dimensions")
    if not (0.0 <= t <= 1.0):
        raise DimensionMismatch(f"mixing weight must lie in [0, 1], got {t}")
    choi = t * a.choi + (1.0 - t) * b.choi
    return PositiveMapSpec(a.d, choi, name or f"mix({a.name},{b.name},{t:g})",
                           a.unital_checked and b.unital_checked,
                           a.positive_checked and b.positive_checked)


def builtin_maps(d: int) -> list[PositiveMapSpec]:
    """Positive unital reference maps on M_d."""
    maps = [
        identity_map(d),
        transpose_map(d),
        reduction_map(d),
        depolarizing_map(d, 0.0),
        depolarizing_map(d, 0.5),
        convex_combination(identity_map(d), transpose_map(d), 0.5, "mix(identity,transpose)"),
    ]
    return maps


def is_unital(alpha: PositiveMapSpec, atol: float = UNITAL_ATOL) -> bool:
    eye = np.eye(alpha.d, dtype=np.complex128)
    return bool(np.max(np.abs(apply_map(alpha, eye) - eye)) <= atol)


def apply_tensor_id_matrix(alpha: PositiveMapSpec, rho: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """(alpha (x) id) on a raw matrix (not necessarily a state)."""
    rho = as_matrix(rho, "rho")
    if rho.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatch(f"matrix shape {rho.shape} != ({d1 * d2}, {d1 * d2})")
    if alpha.d != d1:
        raise DimensionMismatch(f"map dimension {alpha.d} != first factor {d1}")
    r4 = rho.reshape(d1, d2, d1, d2)
    out = np.einsum("kalb,kilj->aibj", alpha.choi4, r4)
    return out.reshape(d1 * d2, d1 * d2)


def partial_transpose_matrix(rho: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Transpose on the first factor of a raw matrix."""
    return apply_tensor_id_matrix(transpose_map(d1), rho, d1, d2)


def partial_transpose(s: BipartiteState) -> np.ndarray:
    """Transpose on the first factor, realized as (transpose (x) id)(rho)."""
    return apply_tensor_id(transpose_map(s.space.d1), s)


def ppt_min_eigenvalue(s: BipartiteState) -> float:
    w, _ = hermitian_eigendecompose(partial_transpose(s))
    return float(w[0])


def ppt_min_eig_and_vector(s: BipartiteState) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue of the partial transpose and its eigenvector."""
    w, v = hermitian_eigendecompose(partial_transpose(s))
    return float(w[0]), v[:, 0]


def kadison_defect(alpha: PositiveMapSpec, a: np.ndarray) -> float:
    """Minimum eigenvalue of alpha(a†a + aa†) - alpha(a†)alpha(a) - alpha(a)alpha(a†).

    Nonnegative (to -1e-10) for genuinely positive unital maps.
    """
    if not (alpha.unital_checked and is_unital(alpha)):
        raise MapNotUnital(f"map {alpha.name or '<anon>'} is not verified unital")
    a = as_matrix(a, "a")
    if a.shape != (alpha.d, alpha.d):
        raise DimensionMismatch(f"element shape {a.shape} != ({alpha.d}, {alpha.d})")
    ad = dagger(a)
    lhs = apply_map(alpha, ad @ a + a @ ad)
    aa = apply_map(alpha, a)
    aad = apply_map(alpha, ad)
    defect = lhs - aad @ aa - aa @ aad
    w, _ = hermitian_eigendecompose((defect + dagger(defect)) / 2.0)
    return float(w[0])


def find_positivity_violation(alpha: PositiveMapSpec, n_samples: int = 200, seed: int = 0,
                              refine_steps: int = 30) -> tuple[float, np.ndarray, np.ndarray] | None:
    """Search for pure vectors with <phi| alpha(|psi><psi|) |phi> < -1e-9.

    Random sampling plus alternating eigenvector refinement: for fixed psi
    the optimal phi is the minimal eigenvector of alpha(psi psi†); for fixed
    phi the value is a Hermitian quadratic form in psi, minimized by its
    minimal eigenvector. Returns (value, psi, phi) for the worst pair found,
    or None when every probe stayed above the tolerance.
    """
    d = alpha.d
    rng = np.random.default_rng(seed)
    c4 = alpha.choi4

    def min_pair(psi):
        best_val, best = np.inf, None
        for _ in range(refine_steps):
            m = np.einsum("k,l,kalb->ab", psi, psi.conj(), c4)
            w, v = np.linalg.eigh((m + dagger(m)) / 2.0)
            phi = v[:, 0]
            val = float(w[0])
            if val >= best_val - 1e-15:
                best_val, best = min(val, best_val), (psi, phi)
                break
            best_val, best = val, (psi, phi)
            # quadratic form in psi for this phi: psi† M psi with
            # M[l, k] = <phi| alpha(E_kl) |phi>
            m2 = np.einsum("kalb,a,b->lk", c4, phi.conj(), phi)
            w2, v2 = np.linalg.eigh((m2 + dagger(m2)) / 2.0)
            psi = v2[:, 0]
        return best_val, best

    worst = (np.inf, None, None)
    for _ in range(n_samples):
        psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi /= np.linalg.norm(psi)
        val, pair = min_pair(psi)
        if val < worst[0]:
            worst = (val, pair[0], pair[1])
    if worst[0] < -POSITIVITY_ATOL:
        return worst
    return None


def is_positive_map(alpha: PositiveMapSpec, n_samples: int = 200, seed: int = 0) -> bool:
    """Sampling-based positivity check; False answers carry a certified witness."""
    return find_positivity_violation(alpha, n_samples, seed) is None
