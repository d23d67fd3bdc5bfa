"""Planar geometry shared by the channel, beamforming and sim layers.

Conventions used everywhere in the package:

* the scene is the 2D plane, coordinates in meters;
* angles are radians, counterclockwise positive;
* array-relative angles are measured from the array broadside direction
  (the direction the array faces), counterclockwise positive, and the
  travel angle ``theta_mov`` of a trajectory follows the same rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class GeometryError(Exception):
    """Degenerate geometry: coincident points, zero-length channels, etc."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    return math.pi if wrapped <= -math.pi else wrapped


@dataclass(frozen=True)
class Point2:
    """A point in the scene plane, coordinates in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")

    def translated(self, dx: float, dy: float) -> "Point2":
        return Point2(self.x + dx, self.y + dy)

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class UlaGeometry:
    """A uniform linear array placed in the scene plane.

    The element axis is perpendicular to ``broadside_angle``; element
    indices increase along the broadside direction rotated +90 degrees,
    which keeps the steering-vector phase convention of the beamforming
    module consistent with :func:`departure_angle`.
    """

    num_elements: int
    spacing: float
    center: Point2
    broadside_angle: float = 0.0

    def __post_init__(self) -> None:
        if self.num_elements < 1:
            raise ValueError(f"num_elements must be >= 1, got {self.num_elements}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be > 0, got {self.spacing}")


@dataclass(frozen=True)
class Trajectory:
    """Straight-line UE motion discretized by displacement.

    ``theta_mov`` is the angle between the travel axis and the UE array
    broadside; it is held fixed for the whole trajectory (the UE
    translates rigidly, it does not rotate). Displacement at step ``k``
    is exactly ``k * step_length``; time enters only through
    ``ue_speed`` where Doppler formulas need it.
    """

    origin: Point2
    theta_mov: float
    step_length: float
    num_steps: int
    ue_speed: float

    def __post_init__(self) -> None:
        if not self.step_length > 0:
            raise ValueError(f"step_length must be > 0, got {self.step_length}")
        if self.num_steps < 1:
            raise ValueError(f"num_steps must be >= 1, got {self.num_steps}")
        if not self.ue_speed > 0:
            raise ValueError(f"ue_speed must be > 0, got {self.ue_speed}")

    def displacement_at(self, step: int) -> float:
        return step * self.step_length


def element_positions(array: UlaGeometry) -> list[Point2]:
    """Positions of all array elements, in element-index order.

    The elements are collinear, centered on ``array.center``, separated
    by ``array.spacing`` along the axis perpendicular to the broadside.
    """
    axis = array.broadside_angle + math.pi / 2
    ux, uy = math.cos(axis), math.sin(axis)
    half_span = 0.5 * (array.num_elements - 1)
    return [
        Point2(
            array.center.x + (k - half_span) * array.spacing * ux,
            array.center.y + (k - half_span) * array.spacing * uy,
        )
        for k in range(array.num_elements)
    ]


def travel_direction(trajectory: Trajectory, array: UlaGeometry) -> float:
    """Global direction of the travel axis for a UE carrying ``array``."""
    return array.broadside_angle + trajectory.theta_mov


def ue_position_at(trajectory: Trajectory, array: UlaGeometry, step: int) -> UlaGeometry:
    """The UE array rigidly translated to trajectory step ``step``.

    Orientation is unchanged; only the center moves, by
    ``step * step_length`` along the travel axis.
    """
    if not 0 <= step <= trajectory.num_steps:
        raise ValueError(
            f"step {step} out of range [0, {trajectory.num_steps}]"
        )
    displacement = trajectory.displacement_at(step)
    direction = travel_direction(trajectory, array)
    return replace(
        array,
        center=array.center.translated(
            displacement * math.cos(direction),
            displacement * math.sin(direction),
        ),
    )


def departure_angle(from_array: UlaGeometry, to_point: Point2) -> float:
    """Signed angle from the array broadside to the ray toward ``to_point``.

    Returns a value in (-pi, pi]; positive counterclockwise. Points with
    ``|angle| < pi/2`` lie in the array's forward half-plane.
    """
    dx = to_point.x - from_array.center.x
    dy = to_point.y - from_array.center.y
    if dx == 0.0 and dy == 0.0:
        raise GeometryError("target point coincides with the array center")
    return wrap_angle(math.atan2(dy, dx) - from_array.broadside_angle)
