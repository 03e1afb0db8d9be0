"""Cyclic representations induced by a state on a matrix algebra, the
right-kernel anti-representation, and the intertwiner construction with
verified norm certificates.

Coordinates are Hilbert-Schmidt throughout. For a density matrix w on C^d
with spectral data (p_j, v_j), the left form <a, b> = Tr(w a†b) is realized
on matrices supported on range(w) from the right, with orthonormal basis
{|i><v_j|}; left multiplication is then exactly a (x) 1_r. The right form
Tr(w b a†) is realized with basis {|v_i><j|}; right multiplication is
1_r (x) a^T. The 1/2-weighted inner product of the doubled space is
absorbed into the coordinates by scaling both summands by 1/sqrt(2), so
adjoints are plain conjugate transposes everywhere.

The single-representation intertwiner is only defined on the real span of
the self-adjoint orbit, so that variant is built in realified coordinates
(real + imaginary parts stacked) where the real-linear extension by zero
and the real adjoint are ordinary matrix operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDensityMatrix, MapNotUnital, WellDefinednessFailure
from .bipartite import validate_density
from .linalg import (
    as_matrix,
    dagger,
    hermitian_basis,
    matrix_units,
    operator_norm,
    psd_sqrt,
)
from .posmaps import PositiveMapSpec, apply_map, is_unital

# Relative Gram-eigenvalue threshold separating the null space from roundoff.
GNS_NULL_REL = 1e-12
# Singular values below this (relative) are treated as null directions of
# the defining data.
SVD_CUTOFF_REL = 1e-10
# A null direction whose target exceeds this norm signals a non-positive map.
WELLDEF_TARGET_TOL = 1e-8


@dataclass(frozen=True)
class GnsRepresentation:
    """Cyclic representation data in orthonormal coordinates.

    ``basis_map`` sends vec(a) to the coordinates of the class of a;
    ``rep(a)`` gives the (anti-)representation matrix; ``omega_vec`` is the
    class of the unit.
    """

    d: int
    dim: int
    rank: int
    basis_map: np.ndarray
    omega_vec: np.ndarray
    anti: bool
    carrier: np.ndarray  # S = V sqrt(p) (left) or T = sqrt(p) V† (right)

    def rep(self, a: np.ndarray) -> np.ndarray:
        a = as_matrix(a, "a")
        if a.shape != (self.d, self.d):
            raise DimensionMismatch(f"element shape {a.shape} != ({self.d}, {self.d})")
        eye = np.eye(self.rank, dtype=np.complex128)
        if self.anti:
            return np.kron(eye, a.T)
        return np.kron(a, eye)

    def coords(self, a: np.ndarray) -> np.ndarray:
        """Orthonormal coordinates of the equivalence class of a."""
        if self.anti:
            return (self.carrier @ a).reshape(-1)
        return (a @ self.carrier).reshape(-1)


def _spectral_support(omega_density: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(omega_density)
    keep = w > max(w[-1], 0.0) * GNS_NULL_REL
    return w[keep], v[:, keep]


def gns_left(d: int, omega_density) -> GnsRepresentation:
    """Representation from the left form <a, b> = Tr(w a†b).

    The Gram matrix of the form in the matrix-unit basis is 1_d (x) w^T, so
    its positive spectrum is the spectrum of w with multiplicity d; the
    quotient keeps d * rank(w) dimensions.
    """
    w = validate_density(omega_density, d, "omega_density")
    p, v = _spectral_support(w)
    r = p.size
    s = v * np.sqrt(p)  # d x r, equals w^{1/2} restricted to its support
    basis_map = np.kron(np.eye(d, dtype=np.complex128), s.T)
    omega_vec = s.reshape(-1)
    return GnsRepresentation(d=d, dim=d * r, rank=r, basis_map=basis_map,
                             omega_vec=omega_vec, anti=False, carrier=s)


def gns_right(d: int, omega_density) -> GnsRepresentation:
    """Anti-representation from the right form <a, b> = Tr(w b a†);
    right multiplication reverses products."""
    w = validate_density(omega_density, d, "omega_density")
    p, v = _spectral_support(w)
    r = p.size
    t = (v * np.sqrt(p)).conj().T  # r x d
    basis_map = np.kron(t, np.eye(d, dtype=np.complex128))
    omega_vec = t.reshape(-1)
    return GnsRepresentation(d=d, dim=r * d, rank=r, basis_map=basis_map,
                             omega_vec=omega_vec, anti=True, carrier=t)


@dataclass(frozen=True)
class LocalDecomposition:
    """Intertwiner data: V maps the representation space into
    Hilbert-Schmidt coordinates of alpha(M_d) rho^{1/2}, with
    V pi(a) V† rho^{1/2} = alpha(a) rho^{1/2} on the verified span and
    operator_norm(V) <= norm_bound."""

    left: GnsRepresentation
    right: GnsRepresentation | None
    tilde_omega: np.ndarray
    v: np.ndarray
    norm_bound: float
    real_form: bool
    residual_max: float
    v_norm: float
    sqrt_rho_vec: np.ndarray

    @property
    def dim_gns(self) -> int:
        return int(self.tilde_omega.size if not self.real_form else self.tilde_omega.size // 2)

    def tilde_rep(self, a: np.ndarray) -> np.ndarray:
        """Representation matrix in the coordinates V acts on."""
        if self.right is None:
            return _realify_op(self.left.rep(a))
        m1 = self.left.rep(a)
        m2 = self.right.rep(a)
        out = np.zeros((m1.shape[0] + m2.shape[0],) * 2, dtype=np.complex128)
        out[:m1.shape[0], :m1.shape[0]] = m1
        out[m1.shape[0]:, m1.shape[0]:] = m2
        return out


def _realify_vec(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag])


def _realify_op(m: np.ndarray) -> np.ndarray:
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def _induced_state_density(alpha: PositiveMapSpec, rho: np.ndarray) -> np.ndarray:
    """Density matrix of a -> Tr(rho alpha(a)), i.e. the adjoint map applied
    to rho. Fails when alpha is not positive enough to produce a state."""
    c4 = alpha.choi4
    x = np.einsum("ab,kbla->lk", rho, c4)
    try:
        return validate_density(x, alpha.d, "induced state")
    except InvalidDensityMatrix as exc:
        raise WellDefinednessFailure(
            f"functional Tr(rho alpha(.)) is not a state ({exc}); map is not positive") from exc


def _solve_intertwiner(x: np.ndarray, y: np.ndarray, elements: list[np.ndarray]):
    """Least-squares V with V x_k = y_k, zero on the orthocomplement.

    Null directions of the defining data must have vanishing targets;
    otherwise the map the data came from cannot be positive.
    """
    u, sing, wt = np.linalg.svd(x, full_matrices=False)
    smax = sing[0] if sing.size else 0.0
    cut = SVD_CUTOFF_REL * max(1.0, smax)
    keep = sing > cut
    for i in np.nonzero(~keep)[0]:
        w_dir = wt[i].conj()
        target = float(np.linalg.norm(y @ w_dir))
        if target > WELLDEF_TARGET_TOL:
            combo = sum(c * e for c, e in zip(w_dir, elements))
            raise WellDefinednessFailure(
                "null vector of the representation has nonvanishing image "
                f"(norm {target:.3e}); offending element:\n{np.array_str(np.asarray(combo), precision=4)}")
    v = (y @ wt[keep].conj().T) @ ((u[:, keep] / sing[keep]).conj().T)
    defining_residual = float(np.max(np.linalg.norm(v @ x - y, axis=0)))
    if defining_residual > 1e-6:
        raise WellDefinednessFailure(
            f"defining data is inconsistent (residual {defining_residual:.3e}); map is not positive")
    return v


def _intertwining_residual(v: np.ndarray, rep_of, sqrt_rho_vec: np.ndarray,
                           targets: list[np.ndarray], elements: list[np.ndarray]) -> float:
    vh_sr = dagger(v) @ sqrt_rho_vec
    res = 0.0
    for a, y in zip(elements, targets):
        lhs = v @ (rep_of(a) @ vh_sr)
        res = max(res, float(np.linalg.norm(lhs - y)))
    return res


def build_intertwiner_single(alpha: PositiveMapSpec, rho) -> LocalDecomposition:
    """Single-representation intertwiner, defined on the real span of the
    self-adjoint orbit and extended by zero; norm bound 1.

    Built in realified coordinates because the defining relation is only
    real-linear. The intertwining identity is certified on a Hermitian
    basis.
    """
    d = alpha.d
    rho = validate_density(rho, d, "rho")
    if not is_unital(alpha):
        raise MapNotUnital(f"map {alpha.name or '<anon>'} is not unital")
    omega_density = _induced_state_density(alpha, rho)
    left = gns_left(d, omega_density)
    sqrt_rho = psd_sqrt(rho)

    basis = hermitian_basis(d)
    x = np.column_stack([_realify_vec(left.coords(h)) for h in basis])
    targets = [_realify_vec((apply_map(alpha, h) @ sqrt_rho).reshape(-1)) for h in basis]
    y = np.column_stack(targets)
    v = _solve_intertwiner(x, y, basis)

    sr_vec = _realify_vec(sqrt_rho.reshape(-1))
    residual = _intertwining_residual(v, lambda h: _realify_op(left.rep(h)), sr_vec, targets, basis)
    return LocalDecomposition(
        left=left, right=None,
        tilde_omega=_realify_vec(left.omega_vec), v=v, norm_bound=1.0,
        real_form=True, residual_max=residual, v_norm=operator_norm(v),
        sqrt_rho_vec=sr_vec)


def build_intertwiner_doubled(alpha: PositiveMapSpec, rho) -> LocalDecomposition:
    """Doubled-representation intertwiner, complex-linear on the direct sum
    of the left representation and the right anti-representation with the
    1/2-weighted inner product; norm bound sqrt(2).

    Well-definedness of V on null directions is exactly the positivity
    consequence alpha(a†a + aa†) >= alpha(a†)alpha(a) + alpha(a)alpha(a†)
    evaluated on the state, and is checked numerically; a violation raises
    instead of silently producing a bad intertwiner.
    """
    d = alpha.d
    rho = validate_density(rho, d, "rho")
    if not is_unital(alpha):
        raise MapNotUnital(f"map {alpha.name or '<anon>'} is not unital")
    omega_density = _induced_state_density(alpha, rho)
    left = gns_left(d, omega_density)
    right = gns_right(d, omega_density)
    sqrt_rho = psd_sqrt(rho)

    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    basis = matrix_units(d)
    x = np.column_stack([
        np.concatenate([left.coords(a) * inv_sqrt2, right.coords(a) * inv_sqrt2])
        for a in basis])
    targets = [(apply_map(alpha, a) @ sqrt_rho).reshape(-1) for a in basis]
    y = np.column_stack(targets)
    v = _solve_intertwiner(x, y, basis)

    tilde_omega = np.concatenate([left.omega_vec * inv_sqrt2, right.omega_vec * inv_sqrt2])
    sr_vec = sqrt_rho.reshape(-1)

    def rep_of(a):
        m1 = left.rep(a)
        m2 = right.rep(a)
        out = np.zeros((m1.shape[0] + m2.shape[0],) * 2, dtype=np.complex128)
        out[:m1.shape[0], :m1.shape[0]] = m1
        out[m1.shape[0]:, m1.shape[0]:] = m2
        return out

    residual = _intertwining_residual(v, rep_of, sr_vec, targets, basis)
    return LocalDecomposition(
        left=left, right=right,
        tilde_omega=tilde_omega, v=v, norm_bound=float(np.sqrt(2.0)),
        real_form=False, residual_max=residual, v_norm=operator_norm(v),
        sqrt_rho_vec=sr_vec)


def verification_report(ld: LocalDecomposition) -> dict:
    """Flat report of the certified quantities."""
    return {
        "residual_max": float(ld.residual_max),
        "v_norm": float(ld.v_norm),
        "dim_gns": int(ld.tilde_omega.size if not ld.real_form else ld.tilde_omega.size // 2),
        "bound": float(ld.norm_bound),
    }
