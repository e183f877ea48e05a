"""Simulated ground truth: rig pose, wall grids, obstacles and sensors.

The rig is kinematic: each tick it displaces by exactly the commanded step
counts times the per-step distance, clamped at the travel limits (which
press the corresponding limit switches). The ultrasonic sensor reports the
distance to the nearest surface ahead with bounded uniform noise, drawn
from a seeded generator so that a scenario plus an actuator trace fully
determines every reading.
"""

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .coverage import StrokeSpec, WallGrid, apply_stroke, spacing_for_overlap
from .errors import ValidationError
from .kinematics import MotorSpec, distance_per_step, max_steps_per_tick

ULTRA_MIN_CM = 2.0  # physical range of the modeled ranging device
ULTRA_MAX_CM = 400.0


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned box on the wall, protruding toward the rig."""

    x_mm: float
    y_mm: float
    width_mm: float
    height_mm: float
    protrusion_cm: float = 30.0

    def __post_init__(self):
        if self.width_mm <= 0 or self.height_mm <= 0:
            raise ValidationError("obstacle dimensions must be > 0")
        if self.protrusion_cm <= 0:
            raise ValidationError("obstacle protrusion_cm must be > 0")

    def contains(self, x_mm: float, y_mm: float, inflate_mm: float = 0.0) -> bool:
        return (
            self.x_mm - inflate_mm <= x_mm < self.x_mm + self.width_mm + inflate_mm
            and self.y_mm - inflate_mm <= y_mm < self.y_mm + self.height_mm + inflate_mm
        )


@dataclass(frozen=True)
class SensorReading:
    """One per tick, taken after the move."""

    ultrasonic_cm: float
    limit_top: bool
    limit_bottom: bool
    limit_left: bool
    limit_right: bool
    t_ms: int
    fault: bool = False


_WALL_KEYS = {"width_mm", "height_mm", "distance_cm", "nozzle_reach_mm", "count", "cell_mm"}
_STROKE_KEYS = {"width_mm", "spacing_mm", "overlap_ratio", "stroke_time_s"}
_MOTOR_KEYS = {"step_angle_deg", "microstep", "pulley_mm", "rpm"}
_SIM_KEYS = {
    "dt_ms",
    "seed",
    "noise_cm",
    "mode",
    "margin_cm",
    "beam_halfwidth_mm",
    "telemetry_ms",
    "shift_ms",
    "max_ticks",
}
_OBSTACLE_KEYS = {"x_mm", "y_mm", "width_mm", "height_mm", "protrusion_cm"}


def _num(section: dict, path: str, key: str, default=None, required=False, integer=False):
    if key not in section:
        if required:
            raise ValidationError("required key missing", field=f"{path}.{key}")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError("must be a number", field=f"{path}.{key}")
    if integer and int(v) != v:
        raise ValidationError("must be an integer", field=f"{path}.{key}")
    return int(v) if integer else float(v)


def _check_keys(section: dict, path: str, allowed: set):
    for k in section:
        if k not in allowed:
            raise ValidationError("unknown key", field=f"{path}.{k}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario: wall, stroke, motor, sim parameters, obstacles."""

    wall_width_mm: float = 457.0
    wall_height_mm: float = 457.0
    wall_distance_cm: float = 100.0
    nozzle_reach_mm: float = math.inf
    walls: int = 1
    cell_mm: float = 1.0
    stroke: StrokeSpec = StrokeSpec()
    motor: MotorSpec = MotorSpec()
    dt_ms: int = 10
    seed: int = 0
    noise_cm: float = 2.0
    mode: str = "continuous"
    margin_cm: float = 5.0
    beam_halfwidth_mm: float = 5.0
    telemetry_ms: int = 100
    shift_ms: int = 1000
    max_ticks: int = 0  # 0 = derive from the plan
    obstacles: tuple = ()

    def __post_init__(self):
        if self.wall_width_mm <= 0 or self.wall_height_mm <= 0:
            raise ValidationError("must be > 0", field="wall.width_mm/height_mm")
        if self.wall_distance_cm <= 0:
            raise ValidationError("must be > 0", field="wall.distance_cm")
        if self.nozzle_reach_mm <= 0:
            raise ValidationError("must be > 0", field="wall.nozzle_reach_mm")
        if self.walls < 1:
            raise ValidationError("must be >= 1", field="wall.count")
        if self.cell_mm <= 0:
            raise ValidationError("must be > 0", field="wall.cell_mm")
        if self.dt_ms <= 0:
            raise ValidationError("must be > 0", field="sim.dt_ms")
        if self.noise_cm < 0:
            raise ValidationError("must be >= 0", field="sim.noise_cm")
        if self.mode not in ("continuous", "burst"):
            raise ValidationError("must be 'continuous' or 'burst'", field="sim.mode")
        if self.margin_cm <= 0:
            raise ValidationError("must be > 0", field="sim.margin_cm")
        if self.telemetry_ms <= 0 or self.telemetry_ms % self.dt_ms != 0:
            raise ValidationError("must be a positive multiple of dt_ms",
                                  field="sim.telemetry_ms")
        if self.shift_ms <= 0:
            raise ValidationError("must be > 0", field="sim.shift_ms")
        for i, ob in enumerate(self.obstacles):
            if not (0 <= ob.x_mm and ob.x_mm + ob.width_mm <= self.wall_width_mm
                    and 0 <= ob.y_mm and ob.y_mm + ob.height_mm <= self.wall_height_mm):
                raise ValidationError("outside wall extents", field=f"obstacle[{i}]")

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        """Build from a parsed scenario document, diagnosing bad fields by path."""
        known = {"wall", "stroke", "motor", "sim", "obstacle"}
        _check_keys(doc, "scenario", known)
        wall = doc.get("wall", {})
        stroke = doc.get("stroke", {})
        motor = doc.get("motor", {})
        sim = doc.get("sim", {})
        _check_keys(wall, "wall", _WALL_KEYS)
        _check_keys(stroke, "stroke", _STROKE_KEYS)
        _check_keys(motor, "motor", _MOTOR_KEYS)
        _check_keys(sim, "sim", _SIM_KEYS)

        width = _num(stroke, "stroke", "width_mm", 10.0)
        if "spacing_mm" in stroke and "overlap_ratio" in stroke:
            raise ValidationError("give either spacing_mm or overlap_ratio, not both",
                                  field="stroke.spacing_mm")
        if "overlap_ratio" in stroke:
            ratio = _num(stroke, "stroke", "overlap_ratio")
            if not (0 <= ratio <= 1):
                raise ValidationError("must be in [0, 1]", field="stroke.overlap_ratio")
            spacing = spacing_for_overlap(width, ratio)
        else:
            spacing = _num(stroke, "stroke", "spacing_mm", 5.5)
        try:
            stroke_spec = StrokeSpec(width, spacing, _num(stroke, "stroke", "stroke_time_s", 35.0))
        except ValidationError as e:
            raise ValidationError(str(e), field="stroke") from e

        try:
            motor_spec = MotorSpec(
                step_angle_deg=_num(motor, "motor", "step_angle_deg", 1.8),
                microstep=_num(motor, "motor", "microstep", 16, integer=True),
                pulley_diameter_mm=_num(motor, "motor", "pulley_mm", 10.186),
                rpm=_num(motor, "motor", "rpm", 60.0),
            )
        except ValidationError as e:
            raise ValidationError(str(e), field="motor") from e

        mode = sim.get("mode", "continuous")
        if not isinstance(mode, str):
            raise ValidationError("must be a string", field="sim.mode")

        obstacles = []
        ob_docs = doc.get("obstacle", [])
        if not isinstance(ob_docs, list):
            raise ValidationError("must be an array of tables ([[obstacle]])",
                                  field="obstacle")
        for i, ob in enumerate(ob_docs):
            _check_keys(ob, f"obstacle[{i}]", _OBSTACLE_KEYS)
            try:
                obstacles.append(
                    Obstacle(
                        x_mm=_num(ob, f"obstacle[{i}]", "x_mm", required=True),
                        y_mm=_num(ob, f"obstacle[{i}]", "y_mm", required=True),
                        width_mm=_num(ob, f"obstacle[{i}]", "width_mm", required=True),
                        height_mm=_num(ob, f"obstacle[{i}]", "height_mm", required=True),
                        protrusion_cm=_num(ob, f"obstacle[{i}]", "protrusion_cm", 30.0),
                    )
                )
            except ValidationError as e:
                if e.field is None:
                    raise ValidationError(str(e), field=f"obstacle[{i}]") from e
                raise

        reach = _num(wall, "wall", "nozzle_reach_mm", math.inf)
        return cls(
            wall_width_mm=_num(wall, "wall", "width_mm", required=True),
            wall_height_mm=_num(wall, "wall", "height_mm", required=True),
            wall_distance_cm=_num(wall, "wall", "distance_cm", 100.0),
            nozzle_reach_mm=reach,
            walls=_num(wall, "wall", "count", 1, integer=True),
            cell_mm=_num(wall, "wall", "cell_mm", 1.0),
            stroke=stroke_spec,
            motor=motor_spec,
            dt_ms=_num(sim, "sim", "dt_ms", 10, integer=True),
            seed=_num(sim, "sim", "seed", required=True, integer=True),
            noise_cm=_num(sim, "sim", "noise_cm", 2.0),
            mode=mode,
            margin_cm=_num(sim, "sim", "margin_cm", 5.0),
            beam_halfwidth_mm=_num(sim, "sim", "beam_halfwidth_mm", 5.0),
            telemetry_ms=_num(sim, "sim", "telemetry_ms", 100, integer=True),
            shift_ms=_num(sim, "sim", "shift_ms", 1000, integer=True),
            max_ticks=_num(sim, "sim", "max_ticks", 0, integer=True),
            obstacles=tuple(obstacles),
        )

    def to_dict(self) -> dict:
        """Canonical plain-dict form (embedded in event logs for replay)."""
        return {
            "wall": {
                "width_mm": self.wall_width_mm,
                "height_mm": self.wall_height_mm,
                "distance_cm": self.wall_distance_cm,
                "nozzle_reach_mm": (None if math.isinf(self.nozzle_reach_mm)
                                    else self.nozzle_reach_mm),
                "count": self.walls,
                "cell_mm": self.cell_mm,
            },
            "stroke": {
                "width_mm": self.stroke.width_mm,
                "spacing_mm": self.stroke.spacing_mm,
                "stroke_time_s": self.stroke.stroke_time_s,
            },
            "motor": {
                "step_angle_deg": self.motor.step_angle_deg,
                "microstep": self.motor.microstep,
                "pulley_mm": self.motor.pulley_diameter_mm,
                "rpm": self.motor.rpm,
            },
            "sim": {
                "dt_ms": self.dt_ms,
                "seed": self.seed,
                "noise_cm": self.noise_cm,
                "mode": self.mode,
                "margin_cm": self.margin_cm,
                "beam_halfwidth_mm": self.beam_halfwidth_mm,
                "telemetry_ms": self.telemetry_ms,
                "shift_ms": self.shift_ms,
                "max_ticks": self.max_ticks,
            },
            "obstacle": [
                {
                    "x_mm": ob.x_mm,
                    "y_mm": ob.y_mm,
                    "width_mm": ob.width_mm,
                    "height_mm": ob.height_mm,
                    "protrusion_cm": ob.protrusion_cm,
                }
                for ob in self.obstacles
            ],
        }

    @classmethod
    def from_canonical(cls, doc: dict) -> "ScenarioConfig":
        doc = dict(doc)
        wall = dict(doc.get("wall", {}))
        if wall.get("nozzle_reach_mm") is None:
            wall.pop("nozzle_reach_mm", None)
        doc["wall"] = wall
        return cls.from_dict(doc)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def replaced(self, **kw) -> "ScenarioConfig":
        from dataclasses import replace

        return replace(self, **kw)


def loads_scenario(text: str) -> ScenarioConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ValidationError(f"not valid TOML: {e}", field="scenario") from e
    return ScenarioConfig.from_dict(doc)


def load_scenario(path) -> ScenarioConfig:
    with open(path, "rb") as f:
        data = f.read()
    return loads_scenario(data.decode("utf-8"))


class World:
    """Owned by one simulation loop; stepped by actuator commands."""

    def __init__(self, cfg: ScenarioConfig, start_x: float, start_y: float):
        self.cfg = cfg
        self.rig_x = start_x
        self.rig_y = start_y
        self.walls = [
            WallGrid.new(cfg.wall_width_mm, cfg.wall_height_mm, cfg.cell_mm)
            for _ in range(cfg.walls)
        ]
        self.active_wall = 0
        self.obstacles = list(cfg.obstacles)
        self.clock_ms = 0
        self.rng = np.random.Generator(np.random.PCG64(cfg.seed))
        self._noise = np.empty(0)
        self._noise_pos = 0
        self._prev_servo = 0
        self._prev_shift = False
        self._half_step = distance_per_step(cfg.motor) / 2.0

    @property
    def grid(self) -> WallGrid:
        return self.walls[self.active_wall]

    def _draw_noise(self) -> float:
        if self.cfg.noise_cm == 0:
            return 0.0
        if self._noise_pos >= len(self._noise):
            self._noise = self.rng.uniform(-self.cfg.noise_cm, self.cfg.noise_cm, 1024)
            self._noise_pos = 0
        v = self._noise[self._noise_pos]
        self._noise_pos += 1
        return float(v)


def world_new(scenario: ScenarioConfig, start_x=None, start_y=None) -> World:
    """Fresh world with the rig hanging at the top-right start pose."""
    if start_x is None:
        w = scenario.stroke.width_mm
        start_x = (scenario.wall_width_mm - w / 2.0
                   if w < scenario.wall_width_mm else scenario.wall_width_mm / 2.0)
    if start_y is None:
        start_y = scenario.wall_height_mm
    return World(scenario, start_x, start_y)


def read_ultrasonic(world: World) -> float:
    """Distance to the nearest surface ahead of the nozzle, with noise.

    An obstacle is seen whenever the rig is inside its box inflated by the
    beam halfwidth: the sound cone picks the protrusion up slightly before
    the nozzle is over it, which is what lets the controller cut the spray
    before painting the obstacle itself.
    """
    cfg = world.cfg
    truth = cfg.wall_distance_cm
    for ob in world.obstacles:
        if ob.contains(world.rig_x, world.rig_y, inflate_mm=cfg.beam_halfwidth_mm):
            truth = min(truth, cfg.wall_distance_cm - ob.protrusion_cm)
    reading = truth + world._draw_noise()
    return min(max(reading, ULTRA_MIN_CM), ULTRA_MAX_CM)


def current_reading(world: World, fault: bool = False) -> SensorReading:
    """Sensor snapshot at the current pose (consumes one noise draw)."""
    hs = world._half_step
    return SensorReading(
        ultrasonic_cm=read_ultrasonic(world),
        limit_top=world.rig_y >= world.cfg.wall_height_mm - hs,
        limit_bottom=world.rig_y <= hs,
        limit_left=world.rig_x <= hs,
        limit_right=world.rig_x >= world.cfg.wall_width_mm - hs,
        t_ms=world.clock_ms,
        fault=fault,
    )


def world_step(world: World, act, dt_ms: int):
    """Advance the world one tick under an actuator command.

    Returns (world, SensorReading). Deposits paint while the servo is at 90:
    over the swept vertical interval when the rig moved, or a one-shot
    square stamp when a burst opens the valve at a standstill.
    """
    cfg = world.cfg
    if dt_ms != cfg.dt_ms:
        raise ValidationError(f"dt_ms {dt_ms} != configured timestep {cfg.dt_ms}")
    cap = max_steps_per_tick(cfg.motor, dt_ms)
    # Overspeed trips the fault flag but the pose still follows the commanded
    # steps exactly; only the travel limits clamp.
    fault = abs(act.step_x) > cap or abs(act.step_y) > cap
    step_x = act.step_x
    step_y = act.step_y

    dps = distance_per_step(cfg.motor)
    y_before = world.rig_y
    world.rig_x = min(max(world.rig_x + step_x * dps, 0.0), cfg.wall_width_mm)
    world.rig_y = min(max(world.rig_y + step_y * dps, 0.0), cfg.wall_height_mm)

    if not act.shift_motor_on and world._prev_shift:
        # Wall shift finished: the rig now faces the next facade.
        world.active_wall = min(world.active_wall + 1, len(world.walls) - 1)

    if act.servo_angle == 90:
        w = cfg.stroke.width_mm
        if world.rig_y != y_before:
            y0, y1 = sorted((y_before, world.rig_y))
            apply_stroke(world.grid, world.rig_x, y0, y1, w)
        elif world._prev_servo != 90:
            apply_stroke(world.grid, world.rig_x,
                         world.rig_y - w / 2.0, world.rig_y + w / 2.0, w)

    world._prev_servo = act.servo_angle
    world._prev_shift = act.shift_motor_on
    world.clock_ms += dt_ms
    return world, current_reading(world, fault=fault)


def inject_obstacle(world: World, obstacle: Obstacle) -> World:
    """Append an obstacle (test hook); it must lie within the wall extents."""
    if not (
        0 <= obstacle.x_mm
        and obstacle.x_mm + obstacle.width_mm <= world.cfg.wall_width_mm
        and 0 <= obstacle.y_mm
        and obstacle.y_mm + obstacle.height_mm <= world.cfg.wall_height_mm
    ):
        raise ValidationError("obstacle outside wall extents", field="obstacle")
    world.obstacles.append(obstacle)
    return world
