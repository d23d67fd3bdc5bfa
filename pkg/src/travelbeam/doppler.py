"""Worst-case Doppler spread versus beam pointing offset.

A multipath component departing at angle ``theta`` from the travel axis
carries a Doppler shift (v/c) f_c cos(theta). For a beam of half-width
``gamma`` steered ``theta`` away from the travel axis, the worst-case
spread over directions inside the main lobe has two regimes:

* travel axis outside the lobe (|theta| >= gamma): the extremes sit at
  the two lobe edges, spread = 2 (v/c) f_c |sin(theta) sin(gamma)|;
* travel axis inside the lobe (|theta| <= gamma): the extremes are the
  travel axis itself and the farthest lobe edge at |theta| + gamma,
  spread = (v/c) f_c (1 - cos(|theta| + gamma)).

Both regimes agree at the seam |theta| = gamma, the spread grows
monotonically with |theta|, and its global minimum over the steerable
sector sits at theta = 0: pointing the beam along the travel axis.
The 1 - cos terms are evaluated as 2 sin^2 of the half angle so the
seam identity 1 - cos(2 gamma) = 2 sin^2(gamma) is exact in floats.

Offsets are evaluated on the full [-pi/2, pi/2] regardless of the
travel angle; clipping the absolute pointing angle theta_mov + theta
to the physically steerable sector is the beamforming module's job.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import LIGHT_SPEED


class SpreadBranch(enum.Enum):
    INSIDE_LOBE = "inside"
    OUTSIDE_LOBE = "outside"


@dataclass(frozen=True)
class DopplerParams:
    """Mobility, carrier and beam parameters for spread analysis.

    ``gamma`` is the main-lobe half-width (beamwidth B = 2 gamma) and
    ``theta_mov`` the travel-axis angle from the UE broadside; pointing
    offsets are measured from the travel axis.
    """

    ue_speed: float
    carrier_frequency_hz: float
    gamma: float
    theta_mov: float = 0.0
    light_speed: float = LIGHT_SPEED

    def __post_init__(self) -> None:
        if not self.ue_speed > 0:
            raise ValueError(f"ue_speed must be > 0, got {self.ue_speed}")
        if not self.carrier_frequency_hz > 0:
            raise ValueError(
                f"carrier_frequency_hz must be > 0, got {self.carrier_frequency_hz}"
            )
        if not 0 < self.gamma <= math.pi / 2:
            raise ValueError(f"gamma must be in (0, pi/2], got {self.gamma}")

    @property
    def peak_shift_hz(self) -> float:
        """Doppler shift of a path aligned with the motion, (v/c) f_c."""
        return self.ue_speed / self.light_speed * self.carrier_frequency_hz


@dataclass(frozen=True)
class SpreadResult:
    theta: float
    spread_hz: float
    branch: SpreadBranch


def _check_offset(theta: float) -> None:
    if abs(theta) > math.pi / 2:
        raise ValueError(
            f"pointing offset {theta} rad outside the evaluated sector [-pi/2, pi/2]"
        )


def doppler_shift(theta: float, params: DopplerParams) -> float:
    """Shift of a single path at angle ``theta`` from the travel axis."""
    return params.peak_shift_hz * math.cos(theta)


def spread_outside(theta: float, params: DopplerParams) -> float:
    """Worst-case spread with the travel axis outside the main lobe.

    Equals |shift(theta - gamma) - shift(theta + gamma)|, the difference
    between the two lobe edges. Valid for gamma <= |theta| <= pi/2.
    """
    _check_offset(theta)
    if abs(theta) < params.gamma:
        raise ValueError(
            f"|theta| = {abs(theta)} is inside the lobe (gamma = {params.gamma})"
        )
    return 2.0 * params.peak_shift_hz * abs(math.sin(theta) * math.sin(params.gamma))


def spread_inside(theta: float, params: DopplerParams) -> float:
    """Worst-case spread with the travel axis inside the main lobe.

    The extremes are the travel axis (peak shift) and the farthest lobe
    edge at |theta| + gamma; even in theta. Valid for |theta| <= gamma.
    """
    _check_offset(theta)
    if abs(theta) > params.gamma:
        raise ValueError(
            f"|theta| = {abs(theta)} is outside the lobe (gamma = {params.gamma})"
        )
    half = 0.5 * (abs(theta) + params.gamma)
    return 2.0 * params.peak_shift_hz * math.sin(half) ** 2


def worst_case_spread(theta: float, params: DopplerParams) -> SpreadResult:
    """Worst-case Doppler spread at pointing offset ``theta``.

    Dispatches on |theta| versus gamma; the seam |theta| = gamma belongs
    to the inside branch (both branches agree there in value).
    """
    _check_offset(theta)
    if abs(theta) <= params.gamma:
        return SpreadResult(theta, spread_inside(theta, params), SpreadBranch.INSIDE_LOBE)
    return SpreadResult(theta, spread_outside(theta, params), SpreadBranch.OUTSIDE_LOBE)


def spread_profile(thetas: np.ndarray, params: DopplerParams) -> np.ndarray:
    """Vectorized worst-case spread over an array of pointing offsets."""
    thetas = np.asarray(thetas, dtype=float)
    if np.any(np.abs(thetas) > math.pi / 2):
        raise ValueError("pointing offsets outside the evaluated sector [-pi/2, pi/2]")
    k = params.peak_shift_hz
    inside = 2.0 * k * np.sin(0.5 * (np.abs(thetas) + params.gamma)) ** 2
    outside = 2.0 * k * np.abs(np.sin(thetas) * math.sin(params.gamma))
    return np.where(np.abs(thetas) <= params.gamma, inside, outside)


def squared_spread_gradient(theta: float, params: DopplerParams) -> float:
    """d/d theta of the squared worst-case spread, per branch.

    Outside the lobe: 4 (v/c)^2 f_c^2 sin^2(gamma) sin(2 theta).
    Inside: sign(theta) 4 (v/c)^2 f_c^2 sin^2((|theta|+gamma)/2)
    sin(|theta|+gamma). Undefined at the branch seam |theta| = gamma
    (the piecewise maximum has a kink there).
    """
    _check_offset(theta)
    if abs(theta) == params.gamma:
        raise ValueError(
            f"gradient undefined at the branch seam |theta| = gamma = {params.gamma}"
        )
    k2 = params.peak_shift_hz ** 2
    if abs(theta) < params.gamma:
        if theta == 0.0:
            # kink at the minimum; one-sided derivatives are +/- the
            # inside formula, their midpoint (and the central finite
            # difference, by even symmetry) is zero
            return 0.0
        edge = abs(theta) + params.gamma
        grad = 4.0 * k2 * math.sin(0.5 * edge) ** 2 * math.sin(edge)
        return grad if theta > 0 else -grad
    return 4.0 * k2 * math.sin(params.gamma) ** 2 * math.sin(2.0 * theta)


def optimal_pointing(params: DopplerParams) -> float:
    """Spread-minimizing UE pointing angle: aligned with the travel axis.

    The worst-case spread is even and strictly increasing in the offset
    from the travel axis, so the optimal offset is zero and the optimal
    broadside-relative pointing angle is ``theta_mov`` itself.
    """
    return params.theta_mov


def brute_force_optimal_offset(
    params: DopplerParams, grid_size: int = 10001
) -> tuple[float, float]:
    """Grid-search argmin of the worst-case spread over [-pi/2, pi/2].

    Returns (theta_argmin, spread_at_argmin). Certification counterpart
    of :func:`optimal_pointing`: the argmin lands within one grid step
    of zero.
    """
    if grid_size < 3:
        raise ValueError(f"grid_size must be >= 3, got {grid_size}")
    thetas = np.linspace(-math.pi / 2, math.pi / 2, grid_size)
    values = spread_profile(thetas, params)
    i = int(np.argmin(values))
    return float(thetas[i]), float(values[i])


def ula_halfwidth(n: int) -> float:
    """Half the null-to-null broadside beamwidth of an n-element ULA.

    arcsin(2/n) for half-wavelength spacing; used as the default gamma
    connecting a concrete array size to the spread analysis.
    """
    if n < 2:
        raise ValueError(f"need at least 2 elements for a beamwidth, got {n}")
    return math.asin(2.0 / n)
