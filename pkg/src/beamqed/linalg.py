"""Complex dense linear algebra and quantum-state primitives.

The joint qubit-resonator Hilbert space is four dimensional with basis
order |g,m>, |g,n>, |e,m>, |e,n> (qubit index slow, resonator index
fast).  States and operators are plain complex numpy arrays; everything
here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BASIS_LABELS",
    "IDX_GM",
    "IDX_GN",
    "IDX_EM",
    "IDX_EN",
    "DensityCheck",
    "basis_projector",
    "hermitian_eigenvalues",
    "matrix_exponential",
    "partial_trace_resonator",
    "tensor_product",
    "validate_density",
]

BASIS_LABELS = ("gm", "gn", "em", "en")
IDX_GM, IDX_GN, IDX_EM, IDX_EN = 0, 1, 2, 3

# Scaled-argument norm below which the Taylor kernel is summed directly.
_SQUARING_THRESHOLD = 0.5
_TAYLOR_TOL = 1e-18
_MAX_TAYLOR_TERMS = 64


def tensor_product(a, b):
    """Kronecker product, first factor slow (qubit) and second fast (resonator)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def basis_projector(index):
    """Projector |k><k| on the joint space; accepts an index or a label from BASIS_LABELS."""
    if isinstance(index, str):
        index = BASIS_LABELS.index(index)
    out = np.zeros((4, 4), dtype=complex)
    out[index, index] = 1.0
    return out


def matrix_exponential(m, scale=1.0):
    """Matrix exponential exp(scale * m) by scaling and squaring.

    The scaled argument is halved until its 1-norm drops below 0.5, the
    Taylor series is summed to machine precision, and the result is
    squared back up.  Intended for small dense generators (up to 16x16);
    relative accuracy is ~1e-12 for argument norms up to about 1e3.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix_exponential expects a square matrix, got shape {a.shape}")
    a = a * scale
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix_exponential: argument has non-finite entries")

    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > _SQUARING_THRESHOLD:
        squarings = int(np.ceil(np.log2(norm / _SQUARING_THRESHOLD)))
        a = a / (2.0**squarings)

    n = a.shape[0]
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, _MAX_TAYLOR_TERMS + 1):
        term = term @ a / k
        result = result + term
        if np.max(np.abs(term)) <= _TAYLOR_TOL:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def hermitian_eigenvalues(m):
    """Ascending real eigenvalues of a Hermitian matrix (dedicated Hermitian solver)."""
    return np.linalg.eigvalsh(np.asarray(m, dtype=complex))


def partial_trace_resonator(rho):
    """Trace out the resonator, returning the 2x2 qubit marginal."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 joint state, got shape {rho.shape}")
    return np.einsum("arbr->ab", rho.reshape(2, 2, 2, 2))


@dataclass(frozen=True)
class DensityCheck:
    """Deviations of a candidate density matrix from the state invariants."""

    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float
    tolerance: float
    trace_ok: bool
    hermitian_ok: bool
    positive_ok: bool

    @property
    def passed(self) -> bool:
        return self.trace_ok and self.hermitian_ok and self.positive_ok


def validate_density(rho, tol=1e-8):
    """Check trace, Hermiticity and positivity of a 4x4 state at tolerance tol.

    Always returns a DensityCheck; never raises on bad values.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 state, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        return DensityCheck(np.inf, np.inf, -np.inf, tol, False, False, False)
    trace_dev = float(abs(np.trace(rho) - 1.0))
    herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return DensityCheck(
        trace_deviation=trace_dev,
        hermiticity_deviation=herm_dev,
        min_eigenvalue=min_eig,
        tolerance=tol,
        trace_ok=trace_dev <= tol,
        hermitian_ok=herm_dev <= tol,
        positive_ok=min_eig >= -tol,
    )
