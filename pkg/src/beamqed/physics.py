"""Closed-form design calculators for the beam and resonator hardware.

Covers the rectangular-cavity resonance formula, the quasi-static
magnetic field of a straight beam (Ampere law), relativistic beam
kinematics, and the geometric validity checks of the near-field model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "SPEED_OF_LIGHT",
    "MU0_OVER_2PI",
    "ELECTRON_REST_ENERGY_EV",
    "HBAR",
    "AssumptionCheck",
    "AssumptionReport",
    "BeamParameters",
    "CavityGeometry",
    "Kinematics",
    "beam_field_at_distance",
    "beam_kinematics",
    "cavity_resonance_frequency",
    "distance_for_target_field",
    "validate_assumptions",
]

SPEED_OF_LIGHT = 2.99792458e8  # m/s
MU0_OVER_2PI = 2.0e-7  # T m / A
ELECTRON_REST_ENERGY_EV = 510998.95  # eV
HBAR = 1.054571817e-34  # J s


@dataclass(frozen=True)
class CavityGeometry:
    """Rectangular cavity dimensions, fill material and mode indices."""

    l1: float
    l2: float
    l3: float
    epsilon_r: float = 1.0
    mu_r: float = 1.0
    mode: tuple = (1, 1, 0)

    def __post_init__(self):
        if min(self.l1, self.l2, self.l3) <= 0:
            raise ValueError("cavity dimensions must be positive")
        if self.epsilon_r < 1.0 or self.mu_r < 1.0:
            raise ValueError("relative permittivity and permeability must be >= 1")
        if len(self.mode) != 3 or any(int(k) != k or k < 0 for k in self.mode):
            raise ValueError(f"mode must be three non-negative integers, got {self.mode!r}")
        if all(k == 0 for k in self.mode):
            raise ValueError("mode (0, 0, 0) has no field; at least one index must be nonzero")


def cavity_resonance_frequency(geometry: CavityGeometry) -> float:
    """Resonant frequency in Hz of the (m, n, q) mode of a rectangular cavity.

    f = c / (2 sqrt(eps_r mu_r)) * sqrt((m/l1)^2 + (n/l2)^2 + (q/l3)^2)
    """
    m, n, q = geometry.mode
    root = math.sqrt((m / geometry.l1) ** 2 + (n / geometry.l2) ** 2 + (q / geometry.l3) ** 2)
    return SPEED_OF_LIGHT / (2.0 * math.sqrt(geometry.epsilon_r * geometry.mu_r)) * root


def beam_field_at_distance(current: float, distance: float) -> float:
    """Magnetic flux density in T at ``distance`` from a straight beam of ``current``."""
    if current < 0:
        raise ValueError(f"current must be >= 0, got {current!r}")
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance!r}")
    return MU0_OVER_2PI * current / distance


def distance_for_target_field(current: float, target_field: float) -> float:
    """Distance in m at which a straight beam of ``current`` produces ``target_field``."""
    if current <= 0:
        raise ValueError(f"current must be positive, got {current!r}")
    if target_field <= 0:
        raise ValueError(f"target_field must be positive, got {target_field!r}")
    return MU0_OVER_2PI * current / target_field


@dataclass(frozen=True)
class Kinematics:
    gamma_factor: float
    speed: float  # m/s


def beam_kinematics(kinetic_energy_ev: float) -> Kinematics:
    """Relativistic Lorentz factor and speed of an electron of given kinetic energy."""
    if kinetic_energy_ev < 0:
        raise ValueError(f"kinetic energy must be >= 0, got {kinetic_energy_ev!r}")
    gamma = 1.0 + kinetic_energy_ev / ELECTRON_REST_ENERGY_EV
    beta = math.sqrt(max(0.0, 1.0 - 1.0 / gamma**2))
    return Kinematics(gamma_factor=gamma, speed=SPEED_OF_LIGHT * beta)


@dataclass(frozen=True)
class BeamParameters:
    """Geometric and electrical description of the modulated electron beam."""

    current: float = 0.0  # A
    beam_radius: float = 0.0  # m
    distance: float = 0.0  # m, beam axis to quantum system
    modulation_wavelength: float = 0.0  # m
    packet_length: float = 0.0  # m, single-electron wave packet
    kinetic_energy: float = 0.0  # eV
    accelerating_voltage: float = 0.0  # V
    initial_speed: float = 0.0  # m/s

    def __post_init__(self):
        for name in (
            "current",
            "beam_radius",
            "distance",
            "modulation_wavelength",
            "packet_length",
            "kinetic_energy",
            "accelerating_voltage",
            "initial_speed",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class AssumptionCheck:
    """One smallness ratio with its verdict: 'ok', 'violation' or 'indeterminate'."""

    name: str
    ratio: float | None
    status: str


@dataclass(frozen=True)
class AssumptionReport:
    threshold: float
    checks: tuple = field(default_factory=tuple)

    @property
    def all_ok(self) -> bool:
        return all(c.status == "ok" for c in self.checks)


def validate_assumptions(beam: BeamParameters, system_size: float, threshold=0.1) -> AssumptionReport:
    """Check the near-field smallness ratios of the model geometry.

    Each ratio (packet length over modulation wavelength, beam width over
    distance, system size over wavelength and over distance) is flagged
    'ok' when at most ``threshold``.  Zero denominators are reported as
    'indeterminate' rather than raising.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold!r}")

    def check(name, numerator, denominator):
        if denominator == 0:
            return AssumptionCheck(name, None, "indeterminate")
        ratio = numerator / denominator
        return AssumptionCheck(name, ratio, "ok" if ratio <= threshold else "violation")

    checks = (
        check("packet_length / modulation_wavelength", beam.packet_length, beam.modulation_wavelength),
        check("beam_width / distance", 2.0 * beam.beam_radius, beam.distance),
        check("system_size / modulation_wavelength", system_size, beam.modulation_wavelength),
        check("system_size / distance", system_size, beam.distance),
    )
    return AssumptionReport(threshold=threshold, checks=checks)
