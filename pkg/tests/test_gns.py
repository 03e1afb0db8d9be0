import numpy as np
import pytest

from qcorr.bipartite import random_full_rank_density
from qcorr.errors import InvalidDensityMatrix, MapNotUnital, WellDefinednessFailure
from qcorr.gns import (
    build_intertwiner_single,
    build_intertwiner_doubled,
    gns_left,
    gns_right,
    verification_report,
)
from qcorr.linalg import dagger, hermitian_basis, matrix_units, operator_norm, psd_sqrt
from qcorr.posmaps import (
    apply_map,
    builtin_maps,
    depolarizing_map,
    identity_map,
    kadison_defect,
    map_from_function,
    transpose_map,
)

from helpers import random_density, random_hermitian


def _omega_residual(ld):
    return float(np.linalg.norm(dagger(ld.v) @ ld.sqrt_rho_vec - ld.tilde_omega))


def test_gns_left_tracial_qubit():
    rep = gns_left(2, np.eye(2) / 2)
    assert rep.dim == 4
    # form is Tr(a†b)/2 on the full algebra
    for a in matrix_units(2):
        for b in matrix_units(2):
            form = np.vdot(rep.coords(a), rep.coords(b))
            assert abs(form - np.trace(a.conj().T @ b) / 2) <= 1e-12
    # class of the unit is proportional to the vectorized identity
    omega = rep.omega_vec / np.linalg.norm(rep.omega_vec)
    target = np.eye(2).reshape(-1) / np.sqrt(2)
    assert min(np.linalg.norm(omega - target), np.linalg.norm(omega + target)) <= 1e-12


def test_gns_left_rank_one_quotient():
    rep = gns_left(2, np.diag([1.0, 0.0]).astype(complex))
    assert rep.dim == 2


def test_gns_left_multiplicative():
    rep = gns_left(2, np.eye(2) / 2)
    e01, e10, e00 = (np.zeros((2, 2), dtype=complex) for _ in range(3))
    e01[0, 1] = e10[1, 0] = e00[0, 0] = 1.0
    assert np.max(np.abs(rep.rep(e01) @ rep.rep(e10) - rep.rep(e00))) <= 1e-12
    rng = np.random.default_rng(0)
    for _ in range(5):
        a, b = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(2))
        assert np.max(np.abs(rep.rep(a @ b) - rep.rep(a) @ rep.rep(b))) <= 1e-10
        assert np.max(np.abs(rep.rep(a.conj().T) - rep.rep(a).conj().T)) <= 1e-12


def test_gns_state_reproduction_left_and_right():
    rng = np.random.default_rng(1)
    for d in (2, 3):
        w = random_density(d, rng)
        for rep in (gns_left(d, w), gns_right(d, w)):
            for a in matrix_units(d):
                got = np.vdot(rep.omega_vec, rep.rep(a) @ rep.omega_vec)
                assert abs(got - np.trace(w @ a)) <= 1e-12


def test_gns_right_antimultiplicative():
    rng = np.random.default_rng(2)
    rep = gns_right(2, random_density(2, rng))
    for _ in range(5):
        c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(2))
        assert np.max(np.abs(rep.rep(c @ d) - rep.rep(d) @ rep.rep(c))) <= 1e-10
        assert np.max(np.abs(rep.rep(c.conj().T) - rep.rep(c).conj().T)) <= 1e-12


def test_gns_right_nilpotent():
    rep = gns_right(2, np.eye(2) / 2)
    e01 = np.zeros((2, 2), dtype=complex)
    e01[0, 1] = 1.0
    assert np.max(np.abs(rep.rep(e01) @ rep.rep(e01))) <= 1e-14


def test_gns_rejects_invalid_density():
    with pytest.raises(InvalidDensityMatrix):
        gns_left(2, np.eye(2))


def test_single_intertwiner_identity_map_is_isometry_on_domain():
    ld = build_intertwiner_single(identity_map(2), np.eye(2) / 2)
    assert ld.residual_max <= 1e-12
    assert abs(ld.v_norm - 1.0) <= 1e-9
    sv = np.linalg.svd(ld.v, compute_uv=False)
    nonzero = sv[sv > 1e-8]
    assert np.allclose(nonzero, 1.0, atol=1e-9)


def test_single_intertwiner_transpose_example():
    ld = build_intertwiner_single(transpose_map(2), np.diag([0.75, 0.25]).astype(complex))
    assert ld.residual_max <= 1e-9
    assert ld.v_norm <= 1.0 + 1e-9


def test_single_intertwiner_depolarizing_omega_identity():
    ld = build_intertwiner_single(depolarizing_map(2, 0.0), np.eye(2) / 2)
    assert ld.v_norm <= 1.0 + 1e-9
    assert _omega_residual(ld) <= 1e-10


def test_doubled_intertwiner_identity_example():
    ld = build_intertwiner_doubled(identity_map(2), np.eye(2) / 2)
    assert ld.residual_max <= 1e-12
    assert ld.v_norm <= np.sqrt(2.0) + 1e-9


def test_doubled_intertwiner_transpose_example():
    ld = build_intertwiner_doubled(transpose_map(2), np.diag([0.75, 0.25]).astype(complex))
    assert ld.residual_max <= 1e-9
    assert ld.v_norm <= 1.41422


def test_doubled_intertwiner_mixed_map_random_state():
    mix = builtin_maps(2)[5]  # (identity + transpose)/2
    rho = random_full_rank_density(2, 77)
    ld = build_intertwiner_doubled(mix, rho)
    assert ld.residual_max <= 1e-9
    assert ld.v_norm <= np.sqrt(2.0) + 1e-9
    assert _omega_residual(ld) <= 1e-10


def test_doubled_intertwiner_intertwining_chain_explicitly():
    # independent spot check of V pi(a) V† rho^{1/2} = alpha(a) rho^{1/2}
    alpha = transpose_map(3)
    rho = random_full_rank_density(3, 5)
    ld = build_intertwiner_doubled(alpha, rho)
    sr = psd_sqrt(rho)
    for a in matrix_units(3):
        lhs = ld.v @ (ld.tilde_rep(a) @ (dagger(ld.v) @ sr.reshape(-1)))
        rhs = (apply_map(alpha, a) @ sr).reshape(-1)
        assert np.linalg.norm(lhs - rhs) <= 1e-9


def test_single_intertwiner_intertwining_chain_self_adjoint():
    alpha = depolarizing_map(2, 0.5)
    rho = random_full_rank_density(2, 6)
    ld = build_intertwiner_single(alpha, rho)
    sr = psd_sqrt(rho)
    for h in hermitian_basis(2):
        target = (apply_map(alpha, h) @ sr).reshape(-1)
        target_r = np.concatenate([target.real, target.imag])
        lhs = ld.v @ (ld.tilde_rep(h) @ (ld.v.T @ ld.sqrt_rho_vec))
        assert np.linalg.norm(lhs - target_r) <= 1e-9


def test_jordan_property_of_doubled_representation():
    rng = np.random.default_rng(3)
    ld = build_intertwiner_doubled(identity_map(3), random_full_rank_density(3, 8))
    for _ in range(5):
        h = random_hermitian(3, rng)
        assert np.max(np.abs(ld.tilde_rep(h @ h) - ld.tilde_rep(h) @ ld.tilde_rep(h))) <= 1e-10


def test_builtin_suite_small():
    for d in (2, 3):
        for alpha in builtin_maps(d):
            for seed in (0, 1):
                rho = random_full_rank_density(d, 50 + seed)
                ld = build_intertwiner_doubled(alpha, rho)
                assert ld.residual_max <= 1e-9, (alpha.name, d, seed)
                assert ld.v_norm <= np.sqrt(2.0) + 1e-9, (alpha.name, d, seed)
                assert _omega_residual(ld) <= 1e-10, (alpha.name, d, seed)
                ld2 = build_intertwiner_single(alpha, rho)
                assert ld2.residual_max <= 1e-9, (alpha.name, d, seed)
                assert ld2.v_norm <= 1.0 + 1e-9, (alpha.name, d, seed)
                assert _omega_residual(ld2) <= 1e-10, (alpha.name, d, seed)


def test_rank_deficient_rho_supported():
    alpha = transpose_map(2)
    rho = np.diag([1.0, 0.0]).astype(complex)
    ld = build_intertwiner_doubled(alpha, rho)
    assert ld.residual_max <= 1e-9
    assert ld.v_norm <= np.sqrt(2.0) + 1e-9


def test_requires_unital_map():
    shrink = map_from_function(2, lambda x: x / 2, "halve")
    with pytest.raises(MapNotUnital):
        build_intertwiner_doubled(shrink, np.eye(2) / 2)


def test_nonpositive_map_detected_by_state_construction():
    sharp = map_from_function(2, lambda x: 2 * x - np.trace(x) * np.eye(2) / 2,
                              "sharpen", unital_checked=True)
    with pytest.raises(WellDefinednessFailure):
        build_intertwiner_doubled(sharp, np.diag([0.95, 0.05]).astype(complex))
    with pytest.raises(WellDefinednessFailure):
        build_intertwiner_single(sharp, np.diag([0.95, 0.05]).astype(complex))


def test_nonpositive_map_never_silently_succeeds():
    # coherence amplifier: unital, not positive, induced state can be valid
    amp = map_from_function(2, lambda x: 2 * x - np.diag(np.diag(x)),
                            "amplify", unital_checked=True)
    rho = np.eye(2, dtype=complex) / 2
    caught = False
    try:
        ld = build_intertwiner_doubled(amp, rho)
        caught = ld.v_norm > ld.norm_bound + 1e-9
    except WellDefinednessFailure:
        caught = True
    e01 = np.array([[0, 1], [0, 0]], dtype=complex)
    caught = caught or kadison_defect(amp, e01) < -1e-10
    assert caught


def test_verification_report_shape():
    ld = build_intertwiner_doubled(identity_map(2), np.eye(2) / 2)
    rep = verification_report(ld)
    assert set(rep) == {"residual_max", "v_norm", "dim_gns", "bound"}
    assert rep["dim_gns"] == 8
    assert abs(rep["bound"] - np.sqrt(2.0)) <= 1e-12
