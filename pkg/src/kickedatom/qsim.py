"""Exact quantum evolution of one quasimomentum manifold.

States live on a truncated momentum ladder p = (n + beta) hbar K,
n in [-n_max, n_max]. One pulse evolves the state with

    U_pulse = exp(-i [J^2/2 - v_tilde cos(theta)] / epsilon)

which in the ladder basis is the exponential of a real symmetric tridiagonal
matrix: diagonal (n + beta)^2 epsilon / 2, off-diagonal -v_tilde / 2 epsilon
(cos theta couples adjacent sites only). The free flight between pulses is a
diagonal phase. The default propagator diagonalizes the tridiagonal matrix
once per parameter set and reuses it for every pulse; a split-operator
sub-stepping method is retained as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .units import DimensionlessParams, PhysicalParams

TRUNCATION_GUARD_SITES = 4
TRUNCATION_GUARD_TOL = 1e-8
NORM_TOL = 1e-10


class InvalidStateError(RuntimeError):
    """State violated a manifold invariant (norm or truncation guard)."""


class TruncationError(InvalidStateError):
    """Population reached the ladder boundary; rerun with a larger n_max."""


@dataclass(frozen=True)
class PulsePropagatorConfig:
    """Numerical knobs for the pulse propagator.

    method is "tridiagonal-exponential" (one-shot, exact to machine precision)
    or "split-operator" (Strang sub-stepping on a theta grid, used as a
    cross-check). substeps_per_pulse only affects the split-operator path.
    """

    substeps_per_pulse: int = 64
    method: str = "tridiagonal-exponential"
    convergence_tolerance: float = 1e-6

    def __post_init__(self):
        if self.substeps_per_pulse < 1:
            raise ValueError("substeps_per_pulse must be >= 1")
        if self.method not in ("tridiagonal-exponential", "split-operator"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.convergence_tolerance > 0.0:
            raise ValueError("convergence_tolerance must be positive")


@dataclass
class ManifoldState:
    """Complex amplitudes over one quasimomentum manifold.

    amplitudes[i] is the coefficient of ladder site n = i - n_max, i.e. of
    momentum (n + beta) hbar K. epsilon is cached for energy evaluation.
    """

    beta: float
    n_max: int
    amplitudes: np.ndarray
    epsilon: float

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2 * self.n_max + 1,):
            raise ValueError("amplitudes must have length 2 n_max + 1")

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def boundary_population(self, sites: int = TRUNCATION_GUARD_SITES) -> float:
        prob = np.abs(self.amplitudes) ** 2
        return float(prob[:sites].sum() + prob[-sites:].sum())

    def check_valid(self):
        if abs(self.norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"norm drifted to {self.norm!r}")
        if self.boundary_population() >= TRUNCATION_GUARD_TOL:
            raise TruncationError(
                f"population {self.boundary_population():.3e} within "
                f"{TRUNCATION_GUARD_SITES} sites of the ladder boundary; "
                f"rerun with n_max > {self.n_max}"
            )

    def copy_with(self, amplitudes: np.ndarray) -> "ManifoldState":
        return ManifoldState(self.beta, self.n_max, amplitudes, self.epsilon)


def plane_wave(n: int, beta: float, epsilon: float, n_max: int = 160) -> ManifoldState:
    """Momentum eigenstate at p = (n + beta) hbar K."""
    if abs(n) > n_max:
        raise ValueError("initial site outside the ladder")
    amps = np.zeros(2 * n_max + 1, dtype=np.complex128)
    amps[n + n_max] = 1.0
    return ManifoldState(beta=beta % 1.0, n_max=n_max, amplitudes=amps, epsilon=epsilon)


class ManifoldPropagator:
    """Pulse unitary and free-flight phases for one (epsilon, v_tilde, beta, n_max).

    Holds the eigendecomposition of the tridiagonal pulse Hamiltonian so the
    cost of building it is paid once per parameter set. apply_* methods accept
    either a single amplitude vector or a (2 n_max + 1, k) column batch.
    """

    def __init__(self, epsilon: float, v_tilde: float, beta: float, n_max: int = 160):
        self.epsilon = float(epsilon)
        self.v_tilde = float(v_tilde)
        self.beta = float(beta) % 1.0
        self.n_max = int(n_max)
        self.n = np.arange(-self.n_max, self.n_max + 1)
        kinetic = (self.n + self.beta) ** 2 * self.epsilon / 2.0
        if v_tilde == 0.0:
            self._eigvals = kinetic
            self._eigvecs = None  # diagonal case, no rotation needed
        else:
            offdiag = np.full(2 * self.n_max, -self.v_tilde / (2.0 * self.epsilon))
            self._eigvals, self._eigvecs = eigh_tridiagonal(kinetic, offdiag)
        self._pulse_phase = np.exp(-1j * self._eigvals)

    def _rotate_apply(self, amps: np.ndarray, phase: np.ndarray) -> np.ndarray:
        if self._eigvecs is None:
            return (phase * amps.T).T if amps.ndim > 1 else phase * amps
        coeff = self._eigvecs.T @ amps
        coeff = (phase * coeff.T).T if amps.ndim > 1 else phase * coeff
        return self._eigvecs @ coeff

    def apply_pulse(self, amps: np.ndarray, inverse: bool = False) -> np.ndarray:
        phase = np.conj(self._pulse_phase) if inverse else self._pulse_phase
        return self._rotate_apply(amps, phase)

    def free_phases(self, resonance_order: int) -> np.ndarray:
        """Resonant inter-pulse factor exp(+i J_n^2/2 eps - i 4 pi L beta J_n / eps)."""
        j_n = (self.n + self.beta) * self.epsilon
        return np.exp(1j * (j_n**2 / (2.0 * self.epsilon) - 4.0 * np.pi * resonance_order * self.beta * j_n / self.epsilon))

    def general_period_phases(self, period: float, pulse_duration: float) -> np.ndarray:
        """Laboratory-frame free factor exp(-i p_n^2 (T - t_p) / 2 M hbar)."""
        if not period > pulse_duration:
            raise ValueError("pulse period must exceed the pulse duration")
        scale = self.epsilon * (period - pulse_duration) / (2.0 * pulse_duration)
        return np.exp(-1j * (self.n + self.beta) ** 2 * scale)

    def delta_kick_free_phases(self, resonance_order: int) -> np.ndarray:
        """Delta-kick free factor: full L T_T flight, exp(-i 2 pi L (n + beta)^2)."""
        return np.exp(-2j * np.pi * resonance_order * (self.n + self.beta) ** 2)


class _GratingPropagator:
    """exp(i phi cos theta) via eigendecomposition of the cos theta tridiagonal.

    beta independent; one decomposition per n_max serves every kick strength.
    """

    def __init__(self, n_max: int):
        dim = 2 * n_max + 1
        self._eigvals, self._eigvecs = eigh_tridiagonal(np.zeros(dim), np.full(dim - 1, 0.5))

    def apply(self, amps: np.ndarray, phi: float) -> np.ndarray:
        phase = np.exp(1j * phi * self._eigvals)
        coeff = self._eigvecs.T @ amps
        coeff = (phase * coeff.T).T if amps.ndim > 1 else phase * coeff
        return self._eigvecs @ coeff


_PROPAGATOR_CACHE: dict = {}
_GRATING_CACHE: dict = {}
_CACHE_LIMIT = 192  # a thermal beta grid is ~40 manifolds; keep several sweeps warm


def get_propagator(epsilon: float, v_tilde: float, beta: float, n_max: int) -> ManifoldPropagator:
    key = (round(float(epsilon), 15), round(float(v_tilde), 15), round(float(beta) % 1.0, 15), int(n_max))
    prop = _PROPAGATOR_CACHE.get(key)
    if prop is None:
        if len(_PROPAGATOR_CACHE) >= _CACHE_LIMIT:
            _PROPAGATOR_CACHE.pop(next(iter(_PROPAGATOR_CACHE)))
        prop = ManifoldPropagator(epsilon, v_tilde, beta, n_max)
        _PROPAGATOR_CACHE[key] = prop
    return prop


def get_grating(n_max: int) -> _GratingPropagator:
    if n_max not in _GRATING_CACHE:
        if len(_GRATING_CACHE) >= 8:
            _GRATING_CACHE.pop(next(iter(_GRATING_CACHE)))
        _GRATING_CACHE[n_max] = _GratingPropagator(n_max)
    return _GRATING_CACHE[n_max]


def _split_operator_pulse(s: ManifoldState, d: DimensionlessParams, substeps: int) -> np.ndarray:
    """Strang-split pulse on a theta grid (FFT between ladder and grid).

    The grid multiplication by cos theta wraps the ladder periodically, which
    matches the open tridiagonal only while the truncation guard holds.
    """
    m = 2 * s.n_max + 1
    n = s.n_values
    dt = 1.0 / substeps
    kin_half = np.exp(-1j * (n + s.beta) ** 2 * s.epsilon * dt / 4.0)
    theta = 2.0 * np.pi * np.arange(m) / m
    pot = np.exp(1j * (d.v_tilde / d.epsilon) * np.cos(theta) * dt)
    # ladder order n=-n_max..n_max -> FFT frequency order
    amps = np.fft.ifftshift(s.amplitudes)
    for _ in range(substeps):
        amps *= np.fft.ifftshift(kin_half)
        grid = np.fft.ifft(amps) * m  # psi(theta_j) = sum_n c_n e^{i n theta_j}
        grid *= pot
        amps = np.fft.fft(grid) / m
        amps *= np.fft.ifftshift(kin_half)
    return np.fft.fftshift(amps)


def apply_pulse(s: ManifoldState, d: DimensionlessParams, cfg: Optional[PulsePropagatorConfig] = None) -> ManifoldState:
    """One standing-wave pulse: exp(-i [J^2/2 - v_tilde cos theta] / epsilon)."""
    cfg = cfg or PulsePropagatorConfig()
    s.check_valid()
    if d.epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if cfg.method == "split-operator":
        amps = _split_operator_pulse(s, d, cfg.substeps_per_pulse)
    else:
        amps = get_propagator(d.epsilon, d.v_tilde, s.beta, s.n_max).apply_pulse(s.amplitudes)
    out = s.copy_with(amps)
    out.check_valid()
    return out


def apply_pulse_inverse(s: ManifoldState, d: DimensionlessParams) -> ManifoldState:
    """Conjugate pulse propagator (time-reversal partner of apply_pulse)."""
    s.check_valid()
    amps = get_propagator(d.epsilon, d.v_tilde, s.beta, s.n_max).apply_pulse(s.amplitudes, inverse=True)
    return s.copy_with(amps)


def apply_free(s: ManifoldState, d: DimensionlessParams) -> ManifoldState:
    """Resonant free flight: diagonal phases, populations untouched."""
    s.check_valid()
    prop = get_propagator(d.epsilon, d.v_tilde, s.beta, s.n_max)
    return s.copy_with(s.amplitudes * prop.free_phases(d.resonance_order))


def floquet_step(s: ManifoldState, d: DimensionlessParams, cfg: Optional[PulsePropagatorConfig] = None) -> ManifoldState:
    """One resonant period: pulse factor first, then the free factor."""
    return apply_free(apply_pulse(s, d, cfg), d)


def floquet_step_general_period(
    s: ManifoldState,
    d: DimensionlessParams,
    period: float,
    p: PhysicalParams,
    cfg: Optional[PulsePropagatorConfig] = None,
) -> ManifoldState:
    """One period of duration T (not necessarily L T_T): pulse, then lab-frame phases."""
    if not period > p.pulse_duration:
        raise ValueError("period must exceed the pulse duration")
    out = apply_pulse(s, d, cfg)
    prop = get_propagator(d.epsilon, d.v_tilde, s.beta, s.n_max)
    return out.copy_with(out.amplitudes * prop.general_period_phases(period, p.pulse_duration))


def delta_kick_step(s: ManifoldState, d: DimensionlessParams) -> ManifoldState:
    """Instantaneous-kick period: phase grating exp(i phi_d cos theta), then L T_T flight."""
    s.check_valid()
    amps = get_grating(s.n_max).apply(s.amplitudes, d.phi_d)
    prop = get_propagator(d.epsilon, d.v_tilde, s.beta, s.n_max)
    out = s.copy_with(amps * prop.delta_kick_free_phases(d.resonance_order))
    out.check_valid()
    return out


def energy(s: ManifoldState) -> float:
    """Mean scaled kinetic energy <J^2/2> with J_n = (n + beta) epsilon."""
    j_n = (s.n_values + s.beta) * s.epsilon
    return float(np.sum(np.abs(s.amplitudes) ** 2 * j_n**2) / 2.0)


def momentum_populations(s: ManifoldState) -> tuple[np.ndarray, np.ndarray]:
    """(momentum in hbar k_L units, probability) over the ladder; p_n = 2 (n + beta)."""
    return 2.0 * (s.n_values + s.beta), np.abs(s.amplitudes) ** 2
