"""UE beam weight construction, BS maximum ratio combining, link SNR.

The UE transmit weights are fixed before channel estimation and held for
the whole coherence block; the BS combiner is matched to the effective
SIMO channel observed at t = 0 and likewise frozen. SNR along the
trajectory therefore degrades exactly as the channel rotates away from
the t = 0 estimate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import RadioConfig, ScattererField, _coords
from .geometry import GeometryError, Trajectory, UlaGeometry

SECTOR_HALF_WIDTH = math.pi / 2
FORWARD_GAIN = math.sqrt(2.0)


class Strategy(enum.Enum):
    """UE transmit strategies compared along a trajectory."""

    OMNIDIRECTIONAL = "omnidirectional"
    TRAVEL_AXIS = "travel_axis"
    STEERED_AT = "steered_at"
    DOMINANT_EIGENMODE = "dominant_eigenmode"


_DIRECTIONAL = (Strategy.TRAVEL_AXIS, Strategy.STEERED_AT)


@dataclass(frozen=True)
class BeamSpec:
    """One UE beamforming strategy and its knobs.

    ``theta_ue`` (broadside-relative pointing angle) applies to
    STEERED_AT only; TRAVEL_AXIS resolves its pointing angle from the
    trajectory. ``backlobe_suppressed`` applies to the directional
    strategies; omnidirectional and eigenmode transmission always use
    unit element gains. ``gamma`` optionally records the main-lobe
    half-width used by Doppler-spread analysis.
    """

    strategy: Strategy
    theta_ue: float | None = None
    backlobe_suppressed: bool = True
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.strategy is Strategy.STEERED_AT:
            if self.theta_ue is None:
                raise ValueError("steered_at requires theta_ue")
            _check_sector(self.theta_ue)
        elif self.theta_ue is not None:
            raise ValueError(f"theta_ue is only meaningful for steered_at, not {self.strategy.value}")
        if self.gamma is not None and not 0 < self.gamma <= math.pi / 2:
            raise ValueError(f"gamma must be in (0, pi/2], got {self.gamma}")

    @property
    def label(self) -> str:
        if self.strategy is Strategy.STEERED_AT:
            return f"steered_at_{self.theta_ue:.4f}rad"
        return self.strategy.value


@dataclass
class CombinerState:
    """Frozen BS-side combiner matched to the t = 0 effective channel."""

    h_est: np.ndarray
    w_bs: np.ndarray


def _check_sector(theta: float) -> None:
    if abs(theta) > SECTOR_HALF_WIDTH:
        raise ValueError(
            f"pointing angle {theta} rad outside the steerable sector [-pi/2, pi/2]"
        )


def steering_vector(theta: float, n: int) -> np.ndarray:
    """Far-field ULA steering vector; entry k = exp(j pi k sin(theta))."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.exp(1j * math.pi * math.sin(theta) * np.arange(n))


def ue_weights(
    spec: BeamSpec,
    trajectory: Trajectory,
    num_elements: int,
    h0: np.ndarray | None = None,
) -> np.ndarray:
    """Unit-norm UE transmit weights for one strategy.

    Omnidirectional transmission activates a single element; the
    directional strategies use the conjugated steering vector at their
    pointing angle; dominant eigenmode transmission takes the right
    singular vector of ``h0`` = H(0) for its largest singular value,
    with the first nonzero entry rotated to be real-positive so the
    output is reproducible.
    """
    if spec.strategy is Strategy.OMNIDIRECTIONAL:
        w = np.zeros(num_elements, dtype=complex)
        w[0] = 1.0
        return w
    if spec.strategy is Strategy.TRAVEL_AXIS:
        theta = trajectory.theta_mov
        _check_sector(theta)
        return steering_vector(theta, num_elements).conj() / math.sqrt(num_elements)
    if spec.strategy is Strategy.STEERED_AT:
        return steering_vector(spec.theta_ue, num_elements).conj() / math.sqrt(num_elements)
    # dominant eigenmode
    if h0 is None:
        raise ValueError("dominant_eigenmode requires the t=0 channel matrix h0")
    if h0.shape[1] != num_elements:
        raise ValueError(
            f"h0 has {h0.shape[1]} columns but the UE array has {num_elements} elements"
        )
    _, _, vh = np.linalg.svd(h0)
    w = vh[0].conj()
    nonzero = np.flatnonzero(np.abs(w) > 1e-12 * np.abs(w).max())
    pivot = w[nonzero[0]]
    return w * (pivot.conjugate() / abs(pivot))


def _departure_angles(array: UlaGeometry, points: np.ndarray) -> np.ndarray:
    """Vectorized broadside-relative angles toward each row of ``points``."""
    dx = points[:, 0] - array.center.x
    dy = points[:, 1] - array.center.y
    if np.any((dx == 0.0) & (dy == 0.0)):
        raise GeometryError("scatterer coincides with the UE array center")
    raw = np.arctan2(dy, dx) - array.broadside_angle
    wrapped = np.remainder(raw + math.pi, math.tau) - math.pi  # [-pi, pi)
    return np.where(wrapped <= -math.pi, math.pi, wrapped)


def gain_mask_for(
    spec: BeamSpec, ue_array: UlaGeometry, scatterers: ScattererField
) -> np.ndarray:
    """Per-scatterer UE antenna gain seen from the current UE position.

    Directional strategies with back-lobe suppression radiate sqrt(2)
    into the forward half-plane (about 3 dB of directivity) and nothing
    behind the array; the boundary |angle| = pi/2 counts as behind.
    Omnidirectional and eigenmode transmission use unit gains.
    """
    n_sc = scatterers.num_scatterers
    if spec.strategy not in _DIRECTIONAL or not spec.backlobe_suppressed:
        return np.ones(n_sc)
    angles = _departure_angles(ue_array, _coords(scatterers.positions))
    return np.where(np.abs(angles) < SECTOR_HALF_WIDTH, FORWARD_GAIN, 0.0)


def mrc_combiner(h_est: np.ndarray) -> CombinerState:
    """Maximum ratio combiner w = conj(h_est) / ||h_est||."""
    h_est = np.asarray(h_est, dtype=complex)
    nrm = np.linalg.norm(h_est)
    if nrm == 0.0:
        raise GeometryError("effective channel is zero; MRC combiner undefined")
    return CombinerState(h_est=h_est.copy(), w_bs=h_est.conj() / nrm)


def post_snr(
    w_bs: np.ndarray, h_t: np.ndarray, w_ue: np.ndarray, radio: RadioConfig
) -> float:
    """Post-combining SNR in dB: (Es/N0) |w_bs^T H(t) w_ue|^2.

    Returns -inf for a fully nulled channel.
    """
    amplitude = abs(w_bs @ h_t @ w_ue)
    if amplitude == 0.0:
        return float("-inf")
    return radio.es_over_n0_db + 20.0 * math.log10(amplitude)
