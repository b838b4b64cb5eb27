"""Fixed-dimension linear algebra and channel primitives for one and two qubits.

Conventions used throughout the package:

* qubit A is the left (slow) Kronecker factor, so the two-qubit basis is
  ordered |00>, |01>, |10>, |11> with A first;
* operators acting on a single factor embed as ``tensor(op, I)`` or
  ``tensor(I, op)``;
* channels are Kraus sets and act on arbitrary operators by linear
  extension, not only on states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

TOL_HERMITIAN = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9
TOL_CPTP = 1e-8
TOL_UNITARY = 1e-8
TOL_BLOCH = 1e-12

PAULI_AXES = ("x", "y", "z")

_PAULIS = {
    "I": np.eye(2, dtype=complex),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
for _m in _PAULIS.values():
    _m.setflags(write=False)


class QstPowerError(Exception):
    """Base class for all errors raised by this package."""


class WrongDimension(QstPowerError):
    pass


class NotTracePreserving(QstPowerError):
    def __init__(self, deviation: float):
        self.deviation = float(deviation)
        super().__init__(
            f"Kraus completeness sum deviates from identity by {deviation:.3e} "
            f"(tolerance {TOL_CPTP:.0e})"
        )


class NotUnitary(QstPowerError):
    pass


class NotUnitVector(QstPowerError):
    pass


def pauli(index: str) -> np.ndarray:
    """Return the 2x2 identity or Pauli matrix for index in {I, x, y, z}."""
    try:
        return _PAULIS[index]
    except KeyError:
        raise KeyError(f"unknown Pauli index {index!r}, expected one of I, x, y, z") from None


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with A as the slow (left) factor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise WrongDimension(f"tensor expects two 2x2 operators, got {a.shape} and {b.shape}")
    return np.kron(a, b)


@dataclass(frozen=True, eq=False)
class BipartiteChannel:
    """A CPTP map on two qubits, stored as a tuple of 4x4 Kraus operators.

    Build instances through :func:`validate_cptp` or :func:`unitary_channel`
    so the completeness relation is checked.
    """

    kraus: tuple[np.ndarray, ...]

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)


def validate_cptp(kraus: Sequence[np.ndarray], dim: int = 4) -> BipartiteChannel:
    """Check Kraus completeness and wrap the operators in a channel.

    Raises WrongDimension for empty sets or operators that are not
    ``dim x dim``, and NotTracePreserving (carrying the max entrywise
    deviation) when sum_k K^dag K differs from the identity by more
    than TOL_CPTP.
    """
    if len(kraus) == 0:
        raise WrongDimension("channel needs at least one Kraus operator")
    ops = []
    for k, op in enumerate(kraus):
        op = np.asarray(op, dtype=complex)
        if op.shape != (dim, dim):
            raise WrongDimension(f"Kraus operator {k} has shape {op.shape}, expected ({dim}, {dim})")
        ops.append(op)
    total = sum(dagger(op) @ op for op in ops)
    deviation = float(np.max(np.abs(total - np.eye(dim))))
    if deviation > TOL_CPTP:
        raise NotTracePreserving(deviation)
    frozen = tuple(ops)
    for op in frozen:
        op.setflags(write=False)
    return BipartiteChannel(kraus=frozen)


def is_unitary(u: np.ndarray, tol: float = TOL_UNITARY) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))) <= tol)


def unitary_channel(u: np.ndarray) -> BipartiteChannel:
    """Wrap a 4x4 unitary as a single-Kraus channel."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise WrongDimension(f"expected a 4x4 matrix, got {u.shape}")
    if not is_unitary(u):
        raise NotUnitary("matrix fails U^dag U = I within 1e-8")
    return validate_cptp([u])


def apply_channel(ch: BipartiteChannel, op: np.ndarray) -> np.ndarray:
    """Apply sum_k K op K^dag; defined for arbitrary operators by linearity."""
    op = np.asarray(op, dtype=complex)
    dim = ch.kraus[0].shape[0]
    if op.shape != (dim, dim):
        raise WrongDimension(f"operator shape {op.shape} does not match channel dimension {dim}")
    out = np.zeros_like(op)
    for k in ch.kraus:
        out += k @ op @ dagger(k)
    return out


def partial_trace_A(op: np.ndarray) -> np.ndarray:
    """Trace out the A factor of a 4x4 operator, returning a 2x2 operator."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (4, 4):
        raise WrongDimension(f"expected a 4x4 operator, got {op.shape}")
    return np.einsum("abac->bc", op.reshape(2, 2, 2, 2))


def bloch_to_pure(t: np.ndarray) -> np.ndarray:
    """Density matrix (I + t.sigma)/2 of the pure state with unit Bloch vector t."""
    t = np.asarray(t, dtype=float)
    if t.shape != (3,):
        raise WrongDimension(f"Bloch vector must have 3 components, got shape {t.shape}")
    if abs(np.linalg.norm(t) - 1.0) > TOL_BLOCH:
        raise NotUnitVector(f"|t| = {np.linalg.norm(t)!r} is not 1 within {TOL_BLOCH:.0e}")
    return 0.5 * (np.eye(2, dtype=complex) + t[0] * _PAULIS["x"] + t[1] * _PAULIS["y"] + t[2] * _PAULIS["z"])


def bloch_of_state(rho: np.ndarray) -> np.ndarray:
    """Bloch vector of a single-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ _PAULIS[ax]).real for ax in PAULI_AXES])


def is_density(
    rho: np.ndarray,
    *,
    herm_tol: float = TOL_HERMITIAN,
    trace_tol: float = TOL_TRACE,
    psd_tol: float = TOL_PSD,
) -> bool:
    """True when rho is Hermitian, unit trace and PSD within tolerances."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.max(np.abs(rho - dagger(rho))) > herm_tol:
        return False
    if abs(np.trace(rho) - 1.0) > trace_tol:
        return False
    return bool(np.min(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))) >= -psd_tol)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via Gaussian matrix + phase-corrected QR."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_channel(rng: np.random.Generator, n_kraus: int = 2, dim: int = 4) -> BipartiteChannel:
    """Random CPTP channel: Gaussian Kraus candidates, completeness-normalized.

    Draws n_kraus complex Gaussian matrices G_k and right-multiplies each by
    (sum_k G^dag G)^(-1/2), which enforces sum_k K^dag K = I exactly.
    """
    if n_kraus < 1:
        raise ValueError("n_kraus must be >= 1")
    gs = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)) for _ in range(n_kraus)]
    total = sum(dagger(g) @ g for g in gs)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(vals**-0.5) @ dagger(vecs)
    return validate_cptp([g @ inv_sqrt for g in gs], dim=dim)
