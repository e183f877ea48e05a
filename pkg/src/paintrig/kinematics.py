"""Open-loop stepper motion math for the rope drive.

All distances are millimetres. The rope travels over a pulley driven by a
microstepped stepper, so linear resolution is pi*D divided by the steps in
one revolution. The default geometry (1.8 deg, x16, 10.186 mm pulley at
60 rpm) quantizes travel to 0.01 mm per step.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class MotorSpec:
    """Stepper + pulley geometry.

    step_angle_deg must divide 360 evenly (whole full-steps per turn).
    """

    step_angle_deg: float = 1.8
    microstep: int = 16
    pulley_diameter_mm: float = 10.186
    rpm: float = 60.0

    def __post_init__(self):
        if not (0 < self.step_angle_deg <= 360):
            raise ValidationError("step_angle_deg must be in (0, 360]")
        full_steps = 360.0 / self.step_angle_deg
        if abs(full_steps - round(full_steps)) > 1e-9:
            raise ValidationError(
                f"step_angle_deg {self.step_angle_deg} does not divide 360 evenly"
            )
        if int(self.microstep) != self.microstep or self.microstep < 1:
            raise ValidationError("microstep must be a positive integer")
        if self.pulley_diameter_mm <= 0:
            raise ValidationError("pulley_diameter_mm must be > 0")
        if self.rpm <= 0:
            raise ValidationError("rpm must be > 0")


DEFAULT_MOTOR = MotorSpec()


@dataclass(frozen=True)
class StepPlan:
    """Quantized travel: `steps` whole steps in `direction` (+1 or -1).

    achievable = steps * distance_per_step * direction, and residual is the
    part of the request that the quantization drops (|residual| is at most
    half a step).
    """

    steps: int
    direction: int
    achievable_mm: float
    residual_mm: float


@functools.lru_cache(maxsize=64)
def steps_per_revolution(spec: MotorSpec) -> int:
    """Microsteps for one full shaft turn: (360 / step angle) * microstep."""
    return round(360.0 / spec.step_angle_deg) * int(spec.microstep)


@functools.lru_cache(maxsize=64)
def distance_per_step(spec: MotorSpec) -> float:
    """Linear rope travel per microstep: pi * pulley diameter / steps per rev."""
    return math.pi * spec.pulley_diameter_mm / steps_per_revolution(spec)


def steps_for_distance(distance_mm: float, spec: MotorSpec = DEFAULT_MOTOR) -> StepPlan:
    """Quantize a signed travel request to whole steps (nearest, half away from zero)."""
    dps = distance_per_step(spec)
    direction = 1 if distance_mm >= 0 else -1
    steps = int(math.floor(abs(distance_mm) / dps + 0.5))
    achievable = steps * dps * direction
    return StepPlan(steps, direction, achievable, distance_mm - achievable)


def steps_for_distances(distances_mm, spec: MotorSpec = DEFAULT_MOTOR) -> np.ndarray:
    """Vectorized step counts (unsigned) for an array of travel requests."""
    dps = distance_per_step(spec)
    d = np.asarray(distances_mm, dtype=np.float64)
    return np.floor(np.abs(d) / dps + 0.5).astype(np.int64)


def position_error(expected_mm: float, actual_mm: float) -> float:
    """Absolute positioning error |expected - actual|."""
    return abs(expected_mm - actual_mm)


@functools.lru_cache(maxsize=64)
def max_steps_per_tick(spec: MotorSpec, dt_ms: float) -> int:
    """Step budget for one tick at the motor's rated speed."""
    return int(spec.rpm * steps_per_revolution(spec) * dt_ms / 60000.0 + 1e-9)
