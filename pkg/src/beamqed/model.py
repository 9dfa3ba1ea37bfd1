"""Hamiltonian, Lindblad generator and parameter presets.

The system is a two-level qubit (|g>, |e>, splitting ``omega0``) tensored
with a two-level resonator mode (|m>, |n>, splitting ``omegaM``).  A
classical current drive at angular frequency ``omega_drive`` couples to
the qubit with strength ``rabi_B`` (magnetic dipole) and to the resonator
with strength ``coupling_br``; ``coupling_qr`` exchanges excitations
between qubit and resonator.  Dissipation enters through lowering
operators on each subsystem with rates ``kappa_q`` and ``kappa_r``.

Three evolution pictures are supported through ``ModelParameters.frame``:

``lab``
    The plain semiclassical Hamiltonian with explicit
    cos(omega_drive * t + phase) drive factors and the full diagonal
    splittings.  Faithful but stiff: stable stepping scales with omega0.

``rotating``
    A co-rotating picture in which every interaction is written as a
    raising operator times exp(i * (residual * t + phase)) plus its
    conjugate.  The residual frequencies are the detunings left after
    the drive: the qubit-resonator exchange keeps
    (omega0 - omegaM) - sign * omega_drive (the drive makes up the
    qubit-resonator mismatch), the drive terms keep omega0 -+ omega_drive
    and omegaM -+ omega_drive, and the double-excitation exchange sits at
    omega0 + omegaM.  Any component whose residual exceeds
    ``carrier_cutoff`` is discarded as an unresolvable fast carrier.
    This is the picture that makes millisecond horizons tractable at
    realistic (GHz-splitting, sub-kHz-coupling) parameters.

``rwa``
    Same as ``rotating`` with the counter-rotating components discarded
    regardless of their residual frequency.

All angular frequencies are in rad/s and all rates in 1/s.  Density
matrices are vectorized by column stacking throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import validate_density

__all__ = [
    "DIPOLE_RATE_PER_TESLA",
    "DEFAULT_FIELD_TESLA",
    "HamiltonianTerm",
    "Liouvillian",
    "ModelParameters",
    "NUMERIC_FIELDS",
    "Q_LOWER",
    "R_LOWER",
    "build_hamiltonian",
    "commutator_superoperator",
    "dissipator_superoperator",
    "hamiltonian_terms",
    "lindblad_rhs",
    "liouvillian_superoperator",
    "max_angular_frequency",
    "preset",
    "unvec_density",
    "vec_density",
]

# Electron-spin magnetic moment over hbar, rad/s per tesla; sets the
# default drive strength rabi_B = DIPOLE_RATE_PER_TESLA * B.
DIPOLE_RATE_PER_TESLA = 1.761e11
DEFAULT_FIELD_TESLA = 3.0e-9

_I2 = np.eye(2, dtype=complex)
_QUBIT_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
_RES_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |m><n|
_SIGMA_Z = {
    "paper": np.diag([1.0, -1.0]).astype(complex),  # |g><g| - |e><e|
    "standard": np.diag([-1.0, 1.0]).astype(complex),
}

Q_LOWER = np.kron(_QUBIT_LOWER, _I2)  # qubit lowering on the joint space
Q_RAISE = Q_LOWER.conj().T
R_LOWER = np.kron(_I2, _RES_LOWER)  # resonator lowering on the joint space
R_RAISE = R_LOWER.conj().T
_N_RES = R_RAISE @ R_LOWER  # |n><n| occupation
_Q_X = Q_LOWER + Q_RAISE
_R_X = R_LOWER + R_RAISE

_FRAMES = ("lab", "rotating", "rwa")
_CONVENTIONS = ("paper", "standard")

NUMERIC_FIELDS = (
    "omega0",
    "omegaM",
    "omega_drive",
    "drive_phase",
    "rabi_B",
    "coupling_qr",
    "coupling_br",
    "kappa_q",
    "kappa_r",
    "scale",
    "carrier_cutoff",
)
_NONNEGATIVE_FIELDS = (
    "omega0",
    "omegaM",
    "omega_drive",
    "rabi_B",
    "coupling_qr",
    "coupling_br",
    "kappa_q",
    "kappa_r",
    "carrier_cutoff",
)


@dataclass(frozen=True)
class ModelParameters:
    """Immutable physical parameters of the driven qubit-resonator model.

    ``scale`` uniformly multiplies every frequency and rate at evaluation
    time, so trajectories obey rho(t; scale * theta) = rho(scale * t; theta).
    ``sigma_z_convention`` selects which qubit level carries +omega0/2 on
    the lab-frame diagonal ('paper': the ground state; 'standard': the
    excited state); it affects nothing else.
    """

    omega0: float = 0.0
    omegaM: float = 0.0
    omega_drive: float = 0.0
    drive_phase: float = 0.0
    rabi_B: float = 0.0
    coupling_qr: float = 0.0
    coupling_br: float = 0.0
    kappa_q: float = 0.0
    kappa_r: float = 0.0
    frame: str = "rotating"
    sigma_z_convention: str = "paper"
    scale: float = 1.0
    carrier_cutoff: float = 1.0e6

    def __post_init__(self):
        for name in _NONNEGATIVE_FIELDS:
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if not np.isfinite(self.drive_phase):
            raise ValueError(f"drive_phase must be finite, got {self.drive_phase!r}")
        if not np.isfinite(self.scale) or self.scale <= 0:
            raise ValueError(f"scale must be finite and > 0, got {self.scale!r}")
        if self.frame not in _FRAMES:
            raise ValueError(f"frame must be one of {_FRAMES}, got {self.frame!r}")
        if self.sigma_z_convention not in _CONVENTIONS:
            raise ValueError(
                f"sigma_z_convention must be one of {_CONVENTIONS}, got {self.sigma_z_convention!r}"
            )


_PRESETS = {
    "k41": (1.60e9, 1.13e9),
    "nv": (17.34e9, 12.26e9),
}
_PRESET_RATE = 150.0


def preset(name, *, hz_is_angular=False, field_tesla=DEFAULT_FIELD_TESLA,
           dipole_rate_per_tesla=DIPOLE_RATE_PER_TESLA):
    """Named parameter sets: 'k41' (potassium-41 atom) or 'nv' (NV- center).

    Couplings and dissipation rates all default to 150 (1/s); with
    ``hz_is_angular`` the two coupling strengths are multiplied by 2*pi,
    reading the nominal 150 as an ordinary frequency in Hz.  The drive
    strength is dipole_rate_per_tesla * field_tesla and the drive
    frequency defaults to the qubit-resonator detuning |omega0 - omegaM|.
    """
    try:
        omega0, omegaM = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r} (expected one of {sorted(_PRESETS)})") from None
    coupling = _PRESET_RATE * (2.0 * np.pi if hz_is_angular else 1.0)
    return ModelParameters(
        omega0=omega0,
        omegaM=omegaM,
        omega_drive=abs(omega0 - omegaM),
        rabi_B=dipole_rate_per_tesla * field_tesla,
        coupling_qr=coupling,
        coupling_br=coupling,
        kappa_q=_PRESET_RATE,
        kappa_r=_PRESET_RATE,
    )


@dataclass(frozen=True, eq=False)
class HamiltonianTerm:
    """One a * (O exp(i (f t + p)) + h.c.) contribution to H(t)."""

    op: np.ndarray
    amplitude: float
    frequency: float
    phase: float
    co_rotating: bool


def hamiltonian_terms(p: ModelParameters):
    """Static part and oscillating terms of H(t)/hbar in the configured frame."""
    s = p.scale
    w0, wm, we = s * p.omega0, s * p.omegaM, s * p.omega_drive
    rabi, g_qr, g_br = s * p.rabi_B, s * p.coupling_qr, s * p.coupling_br
    phi = p.drive_phase

    if p.frame == "lab":
        sz = np.kron(_SIGMA_Z[p.sigma_z_convention], _I2)
        h0 = (w0 / 2.0) * sz + wm * _N_RES + g_qr * (_Q_X @ _R_X)
        terms = [
            HamiltonianTerm(_Q_X, -rabi / 2.0, we, phi, True),
            HamiltonianTerm(_R_X, g_br, we, phi, True),
        ]
    else:
        delta = w0 - wm
        sgn = 1.0 if delta >= 0 else -1.0
        h0 = np.zeros((4, 4), dtype=complex)
        candidates = [
            HamiltonianTerm(Q_RAISE @ R_LOWER, g_qr, delta - sgn * we, 0.0, True),
            HamiltonianTerm(Q_RAISE @ R_RAISE, g_qr, w0 + wm, 0.0, False),
            HamiltonianTerm(Q_RAISE, -rabi / 2.0, w0 - we, -phi, True),
            HamiltonianTerm(Q_RAISE, -rabi / 2.0, w0 + we, phi, False),
            HamiltonianTerm(R_RAISE, g_br, wm - we, -phi, True),
            HamiltonianTerm(R_RAISE, g_br, wm + we, phi, False),
        ]
        cutoff = s * p.carrier_cutoff
        terms = [
            t
            for t in candidates
            if abs(t.frequency) <= cutoff and (p.frame == "rotating" or t.co_rotating)
        ]
    return h0, tuple(t for t in terms if t.amplitude != 0.0)


def build_hamiltonian(p: ModelParameters, t=0.0):
    """Hermitian 4x4 Hamiltonian H(t)/hbar in rad/s for the configured frame."""
    h0, terms = hamiltonian_terms(p)
    h = h0.copy()
    for term in terms:
        z = term.amplitude * np.exp(1j * (term.frequency * t + term.phase))
        h += z * term.op + np.conj(z) * term.op.conj().T
    return h


def lindblad_rhs(rho, t, p: ModelParameters, *, validate=True):
    """Master-equation right-hand side: -i[H, rho] plus both lowering dissipators.

    The result is traceless and Hermitian.  With ``validate`` the input is
    required to be a valid density matrix at tolerance 1e-6.
    """
    rho = np.asarray(rho, dtype=complex)
    if validate:
        check = validate_density(rho, tol=1e-6)
        if not check.passed:
            raise ValueError(
                "invalid density matrix: trace deviation "
                f"{check.trace_deviation:.3g}, hermiticity {check.hermiticity_deviation:.3g}, "
                f"min eigenvalue {check.min_eigenvalue:.3g}"
            )
    h = build_hamiltonian(p, t)
    out = -1j * (h @ rho - rho @ h)
    for rate, lower in ((p.scale * p.kappa_q, Q_LOWER), (p.scale * p.kappa_r, R_LOWER)):
        if rate == 0.0:
            continue
        raise_ = lower.conj().T
        anti = raise_ @ lower
        out += (rate / 2.0) * (2.0 * lower @ rho @ raise_ - anti @ rho - rho @ anti)
    return out


def vec_density(rho):
    """Column-stacked vectorization of a 4x4 matrix."""
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unvec_density(v):
    """Inverse of vec_density."""
    return np.asarray(v, dtype=complex).reshape(4, 4, order="F")


def commutator_superoperator(h):
    """16x16 map of rho -> -i[h, rho] on column-stacked states."""
    id4 = np.eye(4, dtype=complex)
    return -1j * (np.kron(id4, h) - np.kron(h.T, id4))


def dissipator_superoperator(p: ModelParameters):
    """16x16 map of both Lindblad dissipators on column-stacked states."""
    id4 = np.eye(4, dtype=complex)
    out = np.zeros((16, 16), dtype=complex)
    for rate, lower in ((p.scale * p.kappa_q, Q_LOWER), (p.scale * p.kappa_r, R_LOWER)):
        if rate == 0.0:
            continue
        anti = lower.conj().T @ lower
        out += (rate / 2.0) * (
            2.0 * np.kron(lower.conj(), lower) - np.kron(id4, anti) - np.kron(anti.T, id4)
        )
    return out


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Generator of d vec(rho)/dt = matrix @ vec(rho), column-stacking convention."""

    matrix: np.ndarray
    time_dependent: bool
    vectorization: str = "column"


def liouvillian_superoperator(p: ModelParameters, t=0.0) -> Liouvillian:
    """Vectorized generator L(t) with vec(lindblad_rhs(rho, t, p)) = L(t) vec(rho)."""
    matrix = commutator_superoperator(build_hamiltonian(p, t)) + dissipator_superoperator(p)
    _, terms = hamiltonian_terms(p)
    return Liouvillian(
        matrix=matrix,
        time_dependent=any(term.frequency != 0.0 for term in terms),
    )


def max_angular_frequency(p: ModelParameters) -> float:
    """Largest angular frequency present in the configured frame.

    Includes the static Hamiltonian scale, the residual oscillation
    frequencies and amplitudes of the kept drive terms, and the
    dissipation rates; used by the integrator step-size guard.
    """
    h0, terms = hamiltonian_terms(p)
    scales = [float(np.max(np.abs(h0))), p.scale * p.kappa_q, p.scale * p.kappa_r]
    for term in terms:
        scales.append(abs(term.frequency))
        scales.append(abs(term.amplitude))
    return float(max(scales))
