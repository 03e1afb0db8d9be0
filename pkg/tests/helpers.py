"""Shared fixtures and independent oracle implementations for the tests.

The oracles here (loop-based partial trace/transpose, the anti-aligned
twirl decomposition of Werner states) deliberately avoid the library code
paths they are used to check.
"""

from __future__ import annotations

import numpy as np

from qcorr.bipartite import BipartiteSpace, BipartiteState
from qcorr.measures import Ensemble

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)


def singlet_proj() -> np.ndarray:
    v = np.zeros(4, dtype=np.complex128)
    v[1], v[2] = 1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)
    return np.outer(v, v.conj())


def canonical_witness() -> np.ndarray:
    """(1/2) 1 - singlet projector; nonnegative on all product states."""
    return 0.5 * np.eye(4, dtype=np.complex128) - singlet_proj()


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2.0


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def separable_state(k: int, rng: np.random.Generator, pure: bool = False) -> BipartiteState:
    """Explicit convex combination of k product states on 2x2."""
    w = rng.dirichlet(np.ones(k))
    acc = np.zeros((4, 4), dtype=np.complex128)
    for i in range(k):
        if pure:
            acc += w[i] * np.kron(random_pure(2, rng), random_pure(2, rng))
        else:
            acc += w[i] * np.kron(random_density(2, rng), random_density(2, rng))
    return BipartiteState(BipartiteSpace(2, 2), acc)


def naive_partial_trace_second(rho: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Loop-based partial trace over the second factor."""
    out = np.zeros((d1, d1), dtype=np.complex128)
    for i in range(d1):
        for j in range(d1):
            for k in range(d2):
                out[i, j] += rho[i * d2 + k, j * d2 + k]
    return out


def naive_partial_trace_first(rho: np.ndarray, d1: int, d2: int) -> np.ndarray:
    out = np.zeros((d2, d2), dtype=np.complex128)
    for i in range(d2):
        for j in range(d2):
            for k in range(d1):
                out[i, j] += rho[k * d2 + i, k * d2 + j]
    return out


def naive_partial_transpose_first(rho: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Loop-based transpose on the first factor."""
    out = np.zeros_like(rho)
    for i1 in range(d1):
        for i2 in range(d2):
            for j1 in range(d1):
                for j2 in range(d2):
                    out[i1 * d2 + i2, j1 * d2 + j2] = rho[j1 * d2 + i2, i1 * d2 + j2]
    return out


def su2_rotation(axis, angle: float) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * (n[0] * SX + n[1] * SY + n[2] * SZ)


def tetrahedral_unitaries() -> list[np.ndarray]:
    """The 12 rotation unitaries of the tetrahedral group (a unitary
    2-design for qubits): identity, the three pi rotations about the
    coordinate axes, and the eight +-2pi/3 rotations about the body
    diagonals."""
    us = [I2.copy()]
    for ax in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        us.append(su2_rotation(ax, np.pi))
    for sx in (1, -1):
        for sy in (1, -1):
            for angle in (2 * np.pi / 3, -2 * np.pi / 3):
                us.append(su2_rotation((sx, sy, 1), angle))
    return us


def werner_twirl_ensemble(p: float) -> Ensemble:
    """Explicit 12-member decomposition of the Werner state with singlet
    weight p >= 1/3 into pure states whose marginal pairs are anti-aligned.

    Each member is (U x U) phi with phi = cos(t)|01> - sin(t)|10> and
    sin(2t) = (3p - 1)/2, twirled over the tetrahedral 2-design. Every
    member contributes exactly (3p-1)^2/16 to the decorrelated value of the
    canonical witness, which certifies that floor as attainable.
    """
    c = (3.0 * p - 1.0) / 2.0
    if not (0.0 <= c <= 1.0):
        raise ValueError("twirl decomposition needs p in [1/3, 1]")
    t = np.arcsin(c) / 2.0
    phi = np.zeros(4, dtype=np.complex128)
    phi[1], phi[2] = np.cos(t), -np.sin(t)
    members = []
    for u in tetrahedral_unitaries():
        vec = np.kron(u, u) @ phi
        members.append(np.outer(vec, vec.conj()))
    space = BipartiteSpace(2, 2)
    bary = BipartiteState(space, sum(members) / len(members))
    weights = np.full(len(members), 1.0 / len(members))
    return Ensemble(space, weights, tuple(members), bary)


def werner_third_product_ensemble(extra_identity_weight: float = 0.0) -> Ensemble:
    """Explicit product decomposition of the boundary Werner state: the
    equal mixture of the six anti-aligned Pauli-axis product states, plus
    an optional maximally mixed component (yielding Werner states with
    smaller singlet weight)."""
    plus = {
        "x": np.array([1, 1], dtype=np.complex128) / np.sqrt(2),
        "y": np.array([1, 1j], dtype=np.complex128) / np.sqrt(2),
        "z": np.array([1, 0], dtype=np.complex128),
    }
    minus = {
        "x": np.array([1, -1], dtype=np.complex128) / np.sqrt(2),
        "y": np.array([1, -1j], dtype=np.complex128) / np.sqrt(2),
        "z": np.array([0, 1], dtype=np.complex128),
    }
    members = []
    for axis in ("x", "y", "z"):
        for first, second in ((plus, minus), (minus, plus)):
            a, b = first[axis], second[axis]
            members.append(np.kron(np.outer(a, a.conj()), np.outer(b, b.conj())))
    weights = [(1.0 - extra_identity_weight) / 6.0] * 6
    if extra_identity_weight > 0.0:
        members.append(np.eye(4, dtype=np.complex128) / 4.0)
        weights.append(extra_identity_weight)
    space = BipartiteSpace(2, 2)
    bary = BipartiteState(space, sum(w * m for w, m in zip(weights, members)))
    return Ensemble(space, np.asarray(weights), tuple(members), bary)
