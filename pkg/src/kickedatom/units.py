"""Laboratory parameters, dimensionless rescaling, dipole depth, scaling transform.

Everything downstream works with the rescaled quantities

    epsilon = hbar K^2 t_p / M      (plays the role of hbar)
    v_tilde = V_d t_p epsilon / 2 hbar
    phi_d   = V_d t_p / 2 hbar      (phase-grating depth, delta-kick limit)

where K = 2 k_L is the standing-wave wave number. The sign convention for the
dipole depth is V_d > 0 for the -(V_d/2) cos(K x) potential: red-detuned light
(negative detunings) gives a positive depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .constants import A0, C_LIGHT, E_CHARGE, EPS0, HBAR, PLANCK_H, RB85_D2_WAVELENGTH, RB85_MASS, load_atom_data


class SingularInputError(ValueError):
    """Raised for inputs that make a formula singular (zero detuning, N*v_tilde = 0)."""


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame description of one pulse-train experiment.

    Attributes
    ----------
    atomic_mass : float
        M [kg].
    laser_wavenumber : float
        k_L [rad/m]; the standing-wave wave number is K = 2 k_L.
    pulse_duration : float
        t_p [s].
    potential_depth : float
        V_d [J].
    pulse_count : int
        Number of pulses N.
    pulse_period : float
        Pulse period T [s]. At quantum resonance T = L * T_T.
    resonance_order : int
        L, the integer number of Talbot times per period at resonance.
    cloud_temperature : float
        Initial gas temperature [K].
    initial_cloud_sigma : float
        RMS radius of the initial cloud along the standing wave [m].
    tof_duration : float
        Time of flight before imaging [s].
    """

    atomic_mass: float
    laser_wavenumber: float
    pulse_duration: float
    potential_depth: float
    pulse_count: int
    pulse_period: float
    resonance_order: int = 1
    cloud_temperature: float = 6.4e-6
    initial_cloud_sigma: float = 5.0e-4
    tof_duration: float = 9.9e-3

    def __post_init__(self):
        positives = {
            "atomic_mass": self.atomic_mass,
            "laser_wavenumber": self.laser_wavenumber,
            "pulse_duration": self.pulse_duration,
            "pulse_period": self.pulse_period,
            "cloud_temperature": self.cloud_temperature,
            "initial_cloud_sigma": self.initial_cloud_sigma,
            "tof_duration": self.tof_duration,
        }
        for name, value in positives.items():
            if not value > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.potential_depth < 0.0:
            raise ValueError("potential_depth must be >= 0")
        if self.pulse_count < 1:
            raise ValueError("pulse_count must be >= 1")
        if self.resonance_order < 1:
            raise ValueError("resonance_order must be >= 1")
        if not self.pulse_duration < self.pulse_period:
            raise ValueError("pulse_duration must be smaller than pulse_period")

    @property
    def K(self) -> float:
        """Standing-wave wave number K = 2 k_L [rad/m]."""
        return 2.0 * self.laser_wavenumber

    @property
    def recoil_momentum(self) -> float:
        """Photon recoil hbar k_L [kg m/s], the momentum unit of all outputs."""
        return HBAR * self.laser_wavenumber

    @property
    def depth_over_h(self) -> float:
        """V_d / h [Hz]."""
        return self.potential_depth / PLANCK_H

    def with_pulse_duration(self, t_p: float) -> "PhysicalParams":
        return replace(self, pulse_duration=t_p)

    def with_period(self, T: float) -> "PhysicalParams":
        return replace(self, pulse_period=T)


def rb85_params(
    pulse_duration: float,
    depth_over_h_mhz: float,
    pulse_count: int,
    resonance_order: int = 1,
    pulse_period: float | None = None,
    **kwargs,
) -> PhysicalParams:
    """Convenience constructor for the Rb85 / 780 nm experiment geometry.

    ``pulse_period=None`` selects exact quantum resonance, T = L * T_T.
    """
    k_l = 2.0 * math.pi / RB85_D2_WAVELENGTH
    if pulse_period is None:
        t_talbot = 4.0 * math.pi * RB85_MASS / (HBAR * (2.0 * k_l) ** 2)
        pulse_period = resonance_order * t_talbot
    return PhysicalParams(
        atomic_mass=RB85_MASS,
        laser_wavenumber=k_l,
        pulse_duration=pulse_duration,
        potential_depth=depth_over_h_mhz * 1e6 * PLANCK_H,
        pulse_count=pulse_count,
        pulse_period=pulse_period,
        resonance_order=resonance_order,
        **kwargs,
    )


@dataclass(frozen=True)
class DimensionlessParams:
    """Rescaled quantities driving all dynamics.

    beta is the quasimomentum, stored as the fractional part of p / hbar K.
    """

    epsilon: float
    v_tilde: float
    beta: float = 0.0
    resonance_order: int = 1
    pulse_count: int = 1

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be strictly positive")
        if self.v_tilde < 0.0:
            raise ValueError("v_tilde must be >= 0")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must lie in [0, 1)")

    @property
    def phi_d(self) -> float:
        """Phase-grating depth of one pulse, phi_d = v_tilde / epsilon."""
        return self.v_tilde / self.epsilon

    def with_beta(self, beta: float) -> "DimensionlessParams":
        return replace(self, beta=beta % 1.0)


def derive_dimensionless(p: PhysicalParams, beta: float = 0.0) -> DimensionlessParams:
    """Map laboratory parameters onto (epsilon, v_tilde, phi_d).

    epsilon = hbar K^2 t_p / M and v_tilde = V_d t_p epsilon / 2 hbar; the
    quasimomentum defaults to 0 and is set per manifold by the caller.
    """
    eps = HBAR * p.K**2 * p.pulse_duration / p.atomic_mass
    v_tilde = p.potential_depth * p.pulse_duration * eps / (2.0 * HBAR)
    return DimensionlessParams(
        epsilon=eps,
        v_tilde=v_tilde,
        beta=beta % 1.0,
        resonance_order=p.resonance_order,
        pulse_count=p.pulse_count,
    )


def talbot_time(p: PhysicalParams) -> float:
    """Talbot time T_T = 4 pi M / hbar K^2 [s]."""
    return 4.0 * math.pi * p.atomic_mass / (HBAR * p.K**2)


@dataclass(frozen=True)
class Transition:
    """One dipole transition: matrix element [C m] and detuning [rad/s]."""

    dipole_matrix_element: float
    detuning: float
    m_f: int | None = None

    def __post_init__(self):
        if self.detuning == 0.0:
            raise SingularInputError("transition detuning must be nonzero")


@dataclass(frozen=True)
class AtomLineData:
    """Transition data plus beam intensity for the dipole-depth evaluation."""

    transitions: tuple[Transition, ...]
    light_intensity: float
    retro_power_ratio: float

    def __post_init__(self):
        if not self.transitions:
            raise ValueError("at least one transition required")
        if not 0.0 <= self.retro_power_ratio <= 1.0:
            raise ValueError("retro_power_ratio must lie in [0, 1]")
        if self.light_intensity < 0.0:
            raise ValueError("light_intensity must be >= 0")


def atom_line_from_file(path=None, light_intensity=None, retro_power_ratio=None) -> AtomLineData:
    """Build AtomLineData from a JSON data file (defaults to the shipped Rb85 set).

    File schema: ``transitions`` is a list of ``{m_F, mu_e_a0, delta_hz}``;
    ``light_intensity_w_m2`` and ``retro_power_ratio`` give the beam fixture.
    """
    raw = load_atom_data(path)
    transitions = tuple(
        Transition(
            dipole_matrix_element=t["mu_e_a0"] * E_CHARGE * A0,
            detuning=2.0 * math.pi * t["delta_hz"],
            m_f=t.get("m_F"),
        )
        for t in raw["transitions"]
    )
    return AtomLineData(
        transitions=transitions,
        light_intensity=raw["light_intensity_w_m2"] if light_intensity is None else light_intensity,
        retro_power_ratio=raw["retro_power_ratio"] if retro_power_ratio is None else retro_power_ratio,
    )


def _stark_shift_per_mf(line: AtomLineData) -> dict:
    """U(I)/I grouped by m_F label [J per (W/m^2)]. Ungrouped transitions pool under None."""
    sums: dict = {}
    for t in line.transitions:
        sums.setdefault(t.m_f, 0.0)
        sums[t.m_f] += t.dipole_matrix_element**2 / t.detuning
    return {m: s / (2.0 * EPS0 * C_LIGHT * HBAR) for m, s in sums.items()}


def dipole_depth(line: AtomLineData) -> float:
    """Standing-wave potential depth V_d [J].

    Evaluates the ac Stark shift at the antinode intensity I0 (1 + sqrt(r))^2
    and the node intensity I0 (1 - sqrt(r))^2 and returns the (m_F averaged)
    difference, with the sign flipped so red detuning gives a positive depth.
    """
    coefs = _stark_shift_per_mf(line)
    coef = sum(coefs.values()) / len(coefs)
    sqrt_r = math.sqrt(line.retro_power_ratio)
    i_max = line.light_intensity * (1.0 + sqrt_r) ** 2
    i_min = line.light_intensity * (1.0 - sqrt_r) ** 2
    return -(coef * (i_max - i_min))


def dipole_depth_detail(line: AtomLineData) -> dict:
    """Debug view: per-m_F depths [J] alongside the averaged value."""
    coefs = _stark_shift_per_mf(line)
    sqrt_r = math.sqrt(line.retro_power_ratio)
    contrast = line.light_intensity * ((1.0 + sqrt_r) ** 2 - (1.0 - sqrt_r) ** 2)
    per_mf = {m: -(c * contrast) for m, c in coefs.items()}
    return {"per_m_f": per_mf, "averaged": dipole_depth(line)}


def scale_deltap(dp_max: float, p: PhysicalParams) -> tuple[float, float]:
    """Scaling-law coordinates for one measured momentum width.

    Parameters
    ----------
    dp_max : float
        Maximum momentum difference in photon-recoil units (hbar k_L).
    p : PhysicalParams
        Parameters behind the measurement (N, V_d, t_p enter the transform).

    Returns
    -------
    (x, y)
        x = N * v_tilde and y = dp_max / sqrt(N * V_d / h), the ordinate with
        the pulse duration scaled out. y carries units of sqrt(seconds):
        dp_max is kept in recoil units and V_d in frequency units, and the
        constant sqrt(2/M) is omitted.
    """
    if dp_max < 0.0:
        raise ValueError("dp_max must be >= 0")
    d = derive_dimensionless(p)
    x = p.pulse_count * d.v_tilde
    if x == 0.0:
        raise SingularInputError("N * v_tilde = 0: scaled ordinate undefined")
    y = dp_max / math.sqrt(p.pulse_count * p.depth_over_h)
    return x, y


def pulse_duration_for_nv(x: float, pulse_count: int, potential_depth: float, p: PhysicalParams) -> float:
    """Invert N * v_tilde = N V_d K^2 t_p^2 / 2 M for the pulse duration [s]."""
    if x <= 0.0:
        raise ValueError("N * v_tilde must be positive")
    return math.sqrt(2.0 * p.atomic_mass * x / (pulse_count * potential_depth * p.K**2))


def rb85_params_for_dimensionless(
    epsilon: float,
    v_tilde: float,
    pulse_count: int,
    resonance_order: int = 1,
    **kwargs,
) -> PhysicalParams:
    """Rb85 laboratory parameters realizing given (epsilon, v_tilde) exactly."""
    k_l = 2.0 * math.pi / RB85_D2_WAVELENGTH
    t_p = epsilon * RB85_MASS / (HBAR * (2.0 * k_l) ** 2)
    v_d = 2.0 * HBAR * v_tilde / (t_p * epsilon)
    return rb85_params(
        pulse_duration=t_p,
        depth_over_h_mhz=v_d / PLANCK_H / 1e6,
        pulse_count=pulse_count,
        resonance_order=resonance_order,
        **kwargs,
    )
