"""NLOS composite channel synthesis through point scatterers.

The direct UE-BS path is blocked; every propagation path bounces exactly
once off a point scatterer. Each point-to-point leg follows the
non-uniform spherical wave near-field response (amplitude falls as 1/d,
phase advances with exact distance), and the scatterer amplitude follows
a bistatic radar-cross-section taper around its monostatic value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError, Point2, UlaGeometry, element_positions

LIGHT_SPEED = 299792458.0

_FOUR_PI_SQRT = math.sqrt(4.0 * math.pi)


@dataclass(frozen=True)
class RadioConfig:
    """Carrier, mobility and link-budget parameters.

    ``wavelength`` is derived from the carrier frequency when omitted;
    an explicitly supplied value must satisfy wavelength * f_c = c to
    within 1e-9 relative.
    """

    carrier_frequency_hz: float
    ue_speed: float = 30.0
    es_over_n0_db: float = 30.0
    light_speed: float = LIGHT_SPEED
    wavelength: float | None = None

    def __post_init__(self) -> None:
        if not self.carrier_frequency_hz > 0:
            raise ValueError(
                f"carrier_frequency_hz must be > 0, got {self.carrier_frequency_hz}"
            )
        if not self.ue_speed > 0:
            raise ValueError(f"ue_speed must be > 0, got {self.ue_speed}")
        if self.wavelength is None:
            object.__setattr__(
                self, "wavelength", self.light_speed / self.carrier_frequency_hz
            )
        else:
            err = abs(self.wavelength * self.carrier_frequency_hz - self.light_speed)
            if err > 1e-9 * self.light_speed:
                raise ValueError(
                    "wavelength inconsistent with carrier frequency: "
                    f"{self.wavelength} * {self.carrier_frequency_hz} != {self.light_speed}"
                )

    @property
    def es_over_n0_linear(self) -> float:
        return 10.0 ** (self.es_over_n0_db / 10.0)


@dataclass(frozen=True)
class ScattererField:
    """Point scatterers with a shared monostatic RCS amplitude.

    ``phases`` is a reserved extension hook for complex scatterer
    responses; it defaults to all-zero (purely real response).
    """

    positions: tuple[Point2, ...]
    monostatic_rcs: float = 0.5
    phases: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.positions) < 1:
            raise ValueError("at least one scatterer is required")
        if self.monostatic_rcs < 0:
            raise ValueError(f"monostatic_rcs must be >= 0, got {self.monostatic_rcs}")
        object.__setattr__(self, "positions", tuple(self.positions))
        if self.phases is not None:
            if len(self.phases) != len(self.positions):
                raise ValueError("phases length must match number of scatterers")
            object.__setattr__(self, "phases", tuple(self.phases))

    @property
    def num_scatterers(self) -> int:
        return len(self.positions)

    def phase_array(self) -> np.ndarray:
        if self.phases is None:
            return np.zeros(self.num_scatterers)
        return np.asarray(self.phases, dtype=float)


@dataclass
class ChannelSnapshot:
    """One composite channel H = H2 diag(alpha * mask * e^{j phi}) H1.

    All factors are stored so the product can be re-audited:
    ``h1`` is scatterer->UE (N_sc x N_UE), ``h2`` is BS->scatterer
    (N_BS x N_sc), ``alpha`` the real scatterer amplitudes, ``gain_mask``
    the per-scatterer UE antenna gain, ``phases`` the (normally zero)
    scatterer response phases.
    """

    h1: np.ndarray
    h2: np.ndarray
    alpha: np.ndarray
    gain_mask: np.ndarray
    phases: np.ndarray
    h: np.ndarray
    displacement: float = 0.0

    def recompose(self) -> np.ndarray:
        """Re-multiply the stored factors (audit path for ``h``)."""
        diag = self.alpha * self.gain_mask * np.exp(1j * self.phases)
        return (self.h2 * diag[np.newaxis, :]) @ self.h1


def nusw_gain(p1: Point2, p2: Point2, wavelength: float) -> complex:
    """Near-field spherical-wave response between two points.

    Magnitude is 1/sqrt(4 pi d^2) and the phase is -2 pi d / wavelength,
    with d the exact Euclidean distance. Symmetric in its point
    arguments.
    """
    if not wavelength > 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    d = p1.distance_to(p2)
    if d == 0.0:
        raise GeometryError(f"coincident points ({p1.x}, {p1.y}); channel is singular")
    return cmath.exp(-1j * math.tau * d / wavelength) / (_FOUR_PI_SQRT * d)


def bistatic_angle(scatterer: Point2, ue_center: Point2, bs_center: Point2) -> float:
    """Angle at the scatterer between the rays toward the UE and the BS.

    Always in [0, pi]; zero in the monostatic limit (UE and BS in the
    same direction), pi for forward scattering through the scatterer.
    """
    ux, uy = ue_center.x - scatterer.x, ue_center.y - scatterer.y
    vx, vy = bs_center.x - scatterer.x, bs_center.y - scatterer.y
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        raise GeometryError("scatterer coincides with an array center")
    cos_beta = (ux * vx + uy * vy) / (nu * nv)
    return math.acos(min(1.0, max(-1.0, cos_beta)))


def bistatic_alpha(
    scatterer: Point2,
    ue_center: Point2,
    bs_center: Point2,
    monostatic_rcs: float,
) -> float:
    """Scatterer amplitude: monostatic RCS tapered by cos(beta / 2)."""
    return monostatic_rcs * math.cos(0.5 * bistatic_angle(scatterer, ue_center, bs_center))


def _coords(points: list[Point2] | tuple[Point2, ...]) -> np.ndarray:
    return np.array([(p.x, p.y) for p in points], dtype=float)


def _nusw_matrix(a: np.ndarray, b: np.ndarray, wavelength: float) -> np.ndarray:
    """Pairwise NUSW responses between point sets a (M,2) and b (N,2)."""
    diff = a[:, np.newaxis, :] - b[np.newaxis, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    if np.any(d == 0.0):
        raise GeometryError("coincident points; channel is singular")
    return np.exp(-1j * math.tau / wavelength * d) / (_FOUR_PI_SQRT * d)


def build_h1(
    scatterers: ScattererField, ue_array: UlaGeometry, radio: RadioConfig
) -> np.ndarray:
    """Scatterer-to-UE channel matrix, entry (m, n) = NUSW(p_m_sc, p_n_ue)."""
    return _nusw_matrix(
        _coords(scatterers.positions),
        _coords(element_positions(ue_array)),
        radio.wavelength,
    )


def build_h2(
    bs_array: UlaGeometry, scatterers: ScattererField, radio: RadioConfig
) -> np.ndarray:
    """BS-to-scatterer channel matrix, entry (l, m) = NUSW(p_l_bs, p_m_sc).

    Fixed along a trajectory: only the UE moves.
    """
    return _nusw_matrix(
        _coords(element_positions(bs_array)),
        _coords(scatterers.positions),
        radio.wavelength,
    )


def bistatic_alpha_all(
    scatterers: ScattererField, ue_center: Point2, bs_center: Point2
) -> np.ndarray:
    """Vector of bistatic amplitudes for every scatterer in the field."""
    sc = _coords(scatterers.positions)
    u = np.array([ue_center.x, ue_center.y]) - sc
    v = np.array([bs_center.x, bs_center.y]) - sc
    nu = np.hypot(u[:, 0], u[:, 1])
    nv = np.hypot(v[:, 0], v[:, 1])
    if np.any(nu == 0.0) or np.any(nv == 0.0):
        raise GeometryError("scatterer coincides with an array center")
    cos_beta = np.clip((u * v).sum(axis=1) / (nu * nv), -1.0, 1.0)
    return scatterers.monostatic_rcs * np.cos(0.5 * np.arccos(cos_beta))


def assemble_channel(
    scatterers: ScattererField,
    ue_array_at_step: UlaGeometry,
    bs_array: UlaGeometry,
    radio: RadioConfig,
    gain_mask: np.ndarray,
    h2: np.ndarray | None = None,
    displacement: float = 0.0,
) -> ChannelSnapshot:
    """Assemble H = H2 diag(alpha * gain_mask) H1 at one UE position.

    ``gain_mask`` holds the per-scatterer UE antenna gain (all-ones, or
    the back-lobe suppression pattern produced by the beamforming
    module). ``h2`` may carry a precomputed BS-side matrix; it is
    recomputed when absent. The scatterer amplitudes are evaluated for
    the current UE center, so they drift as the UE moves.
    """
    mask = np.asarray(gain_mask, dtype=float)
    n_sc = scatterers.num_scatterers
    if mask.shape != (n_sc,):
        raise ValueError(f"gain_mask must have shape ({n_sc},), got {mask.shape}")
    h1 = build_h1(scatterers, ue_array_at_step, radio)
    if h2 is None:
        h2 = build_h2(bs_array, scatterers, radio)
    elif h2.shape != (bs_array.num_elements, n_sc):
        raise ValueError(
            f"precomputed h2 has shape {h2.shape}, expected "
            f"({bs_array.num_elements}, {n_sc})"
        )
    alpha = bistatic_alpha_all(scatterers, ue_array_at_step.center, bs_array.center)
    phases = scatterers.phase_array()
    diag = alpha * mask * np.exp(1j * phases)
    h = (h2 * diag[np.newaxis, :]) @ h1
    return ChannelSnapshot(
        h1=h1,
        h2=h2,
        alpha=alpha,
        gain_mask=mask,
        phases=phases,
        h=h,
        displacement=displacement,
    )
