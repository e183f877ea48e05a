"""Firmware-style mission controller for the painting rig.

Drives a boustrophedon column sweep: descend spraying, climb dry, shift one
stroke spacing to the left, repeat; an operator can pause, resume, abort,
jog and force wall shifts at any time. All motion is open loop - the
controller dead-reckons its pose from the step counts it emits, quantized
by the stepper geometry, and uses the limit switches only as a backstop.

Safety rule enforced throughout: the spray is only ever on while DESCENDING.
"""

import enum
import functools
import json
import math
from dataclasses import dataclass

from .coverage import StrokeSpec
from .errors import ValidationError
from .kinematics import (
    DEFAULT_MOTOR,
    MotorSpec,
    distance_per_step,
    max_steps_per_tick,
    steps_for_distance,
)


class Mode(enum.Enum):
    IDLE = "IDLE"
    READY = "READY"
    DESCENDING = "DESCENDING"
    ASCENDING = "ASCENDING"
    SHIFTING_COLUMN = "SHIFTING_COLUMN"
    SHIFTING_WALL = "SHIFTING_WALL"
    OBSTACLE_HOLD = "OBSTACLE_HOLD"
    PAUSED = "PAUSED"
    DONE = "DONE"
    FAULT = "FAULT"


# Modes a PAUSE command interrupts (and RESUME returns to).
ACTIVE_MODES = frozenset(
    {
        Mode.READY,
        Mode.DESCENDING,
        Mode.ASCENDING,
        Mode.SHIFTING_COLUMN,
        Mode.SHIFTING_WALL,
        Mode.OBSTACLE_HOLD,
    }
)

BURST_MS = 500  # servo held at 90 degrees this long per burst waypoint

COMMAND_KINDS = (
    "HELLO",
    "START",
    "PAUSE",
    "RESUME",
    "ABORT",
    "JOG",
    "SPRAY",
    "SHIFT",
    "SET",
    "GET_STATUS",
)

JOG_DIRECTIONS = ("UP", "DOWN", "LEFT", "RIGHT")


@dataclass(frozen=True)
class Command:
    """One operator command, validated at construction."""

    kind: str
    direction: str = ""  # JOG
    amount_mm: float = 0.0  # JOG
    on: bool = False  # SPRAY
    key: str = ""  # SET
    value: str = ""  # SET

    def __post_init__(self):
        if self.kind not in COMMAND_KINDS:
            raise ValidationError(f"unknown command kind {self.kind!r}")
        if self.kind == "JOG":
            if self.direction not in JOG_DIRECTIONS:
                raise ValidationError(f"bad jog direction {self.direction!r}")
            if not (math.isfinite(self.amount_mm) and self.amount_mm > 0):
                raise ValidationError("jog distance must be a positive number")
        if self.kind == "SET" and not self.key:
            raise ValidationError("SET requires a key")

    @property
    def verb(self) -> str:
        return "GET" if self.kind == "GET_STATUS" else self.kind


@dataclass(frozen=True)
class Event:
    """One log record: state transition, ACK/NAK, obstacle edge, telemetry..."""

    t_ms: int
    kind: str
    detail: str

    def to_json_line(self) -> str:
        return json.dumps(
            {"t_ms": self.t_ms, "kind": self.kind, "detail": self.detail},
            sort_keys=True,
            separators=(",", ":"),
        )

    @classmethod
    def from_json_line(cls, line: str) -> "Event":
        obj = json.loads(line)
        return cls(int(obj["t_ms"]), str(obj["kind"]), str(obj["detail"]))


@dataclass(frozen=True)
class ActuatorCommand:
    """Per-tick actuator outputs: signed step counts, servo angle (0 or 90,
    90 = spray), and the wall-shift motor flag."""

    step_x: int = 0
    step_y: int = 0
    servo_angle: int = 0
    shift_motor_on: bool = False

    def __post_init__(self):
        if self.servo_angle not in (0, 90):
            raise ValidationError("servo_angle must be 0 or 90")


@dataclass(frozen=True)
class MissionPlan:
    """Columns to paint, right to left, plus the vertical stroke extent."""

    column_centers: tuple
    y_top_mm: float
    y_bottom_mm: float
    stroke: StrokeSpec
    mode: str = "continuous"  # or "burst"
    walls: int = 1
    unpaintable_bottom_mm: float = 0.0

    @property
    def gapped(self) -> bool:
        return self.stroke.spacing_mm > self.stroke.width_mm


def plan_mission(
    wall_width_mm: float,
    wall_height_mm: float,
    stroke: StrokeSpec,
    nozzle_reach_mm: float = math.inf,
    mode: str = "continuous",
    walls: int = 1,
) -> MissionPlan:
    """Lay out stroke columns covering the wall from the right edge leftwards.

    Consecutive centres sit one spacing apart; the last one is clamped so the
    final stroke ends at the left edge. A nozzle reach shorter than the wall
    leaves an unpaintable band at the bottom, reflected in y_bottom.
    """
    if wall_width_mm <= 0 or wall_height_mm <= 0:
        raise ValidationError("wall dimensions must be > 0")
    if nozzle_reach_mm <= 0:
        raise ValidationError("nozzle_reach_mm must be > 0")
    if mode not in ("continuous", "burst"):
        raise ValidationError(f"unknown paint mode {mode!r}")
    if walls < 1:
        raise ValidationError("walls must be >= 1")

    w = stroke.width_mm
    if w >= wall_width_mm:
        centers = (wall_width_mm / 2.0,)
    else:
        if stroke.spacing_mm == 0:
            raise ValidationError("zero spacing cannot cover a wall wider than the stroke")
        first = wall_width_mm - w / 2.0
        count = 1 + math.ceil((wall_width_mm - w) / stroke.spacing_mm - 1e-9)
        centers = [first - i * stroke.spacing_mm for i in range(count)]
        centers[-1] = max(centers[-1], w / 2.0)
        if len(centers) > 1 and centers[-1] >= centers[-2] - 1e-9:
            centers.pop()
        centers = tuple(centers)

    y_bottom = max(0.0, wall_height_mm - nozzle_reach_mm)
    return MissionPlan(
        column_centers=centers,
        y_top_mm=wall_height_mm,
        y_bottom_mm=y_bottom,
        stroke=stroke,
        mode=mode,
        walls=walls,
        unpaintable_bottom_mm=y_bottom,
    )


@functools.lru_cache(maxsize=16)
def burst_waypoints(plan: MissionPlan) -> tuple:
    """Descent stops for burst mode, one stroke width apart so the square
    stamps abut; the last stop is clamped to keep the bottom covered."""
    w = plan.stroke.width_mm
    span = plan.y_top_mm - plan.y_bottom_mm
    if span <= w:
        return ((plan.y_top_mm + plan.y_bottom_mm) / 2.0,)
    stops = []
    y = plan.y_top_mm - w / 2.0
    floor_y = plan.y_bottom_mm + w / 2.0
    while y >= floor_y - 1e-9:
        stops.append(y)
        y -= w
    if stops[-1] > floor_y + 1e-9:
        stops.append(floor_y)
    return tuple(stops)


@dataclass
class ControllerConfig:
    """Fixed wiring of one controller instance (plus two operator-settable
    knobs, telemetry_ms and margin_cm, changed via SET)."""

    motor: MotorSpec = DEFAULT_MOTOR
    dt_ms: int = 10
    wall_width_mm: float = 457.0
    wall_height_mm: float = 457.0
    wall_distance_cm: float = 100.0
    margin_cm: float = 5.0
    shift_ms: int = 1000
    telemetry_ms: int = 100


@dataclass
class ControllerState:
    """Full mutable controller state; advanced only by tick()/handle_command()."""

    mode: Mode = Mode.IDLE
    x: float = 0.0
    y: float = 0.0
    spray_on: bool = False
    column_index: int = 0
    burst_remaining_ms: int = 0
    last_ultrasonic_cm: float = 0.0
    wall_index: int = 0
    t_ms: int = 0
    prior_mode: Mode = Mode.IDLE  # what RESUME returns to
    spray_gate: bool = True  # operator SPRAY OFF closes this
    waypoint_index: int = 0
    shift_elapsed_ms: int = 0
    jog_dx_mm: float = 0.0
    jog_dy_mm: float = 0.0
    aborted: bool = False  # set by ABORT, cleared by START; bridges read it


def initial_state(plan: MissionPlan) -> ControllerState:
    """Controller state for a rig hanging at the start pose (top right)."""
    return ControllerState(x=plan.column_centers[0], y=plan.y_top_mm)


def obstacle_guard(ultrasonic_cm: float, expected_wall_cm: float, margin_cm: float = 5.0) -> bool:
    """True (= hold) when the reading is shorter than the wall by more than
    the margin, i.e. something protrudes between nozzle and wall. The margin
    must exceed the sensor error bound (default 5 cm against 2 cm of noise).
    """
    return ultrasonic_cm < expected_wall_cm - margin_cm


def _mode_event(state, to: Mode, events):
    events.append(Event(state.t_ms, "mode", f"{state.mode.value}->{to.value}"))
    state.mode = to


def handle_command(state: ControllerState, cmd: Command, cfg: ControllerConfig):
    """Apply one operator command; illegal transitions NAK and change nothing.

    Returns (state, events); the state object is mutated in place.
    """
    events = []

    def ack():
        events.append(Event(state.t_ms, "ack", cmd.verb))

    def nak(reason):
        events.append(Event(state.t_ms, "nak", f"{cmd.verb} {reason}"))

    kind = cmd.kind
    if kind == "HELLO":
        ack()  # session arbitration (BUSY) happens in the bridge
    elif kind == "START":
        if state.mode is Mode.IDLE:
            state.aborted = False
            _mode_event(state, Mode.READY, events)
            ack()
        else:
            nak("ILLEGAL")
    elif kind == "PAUSE":
        if state.mode in ACTIVE_MODES:
            state.prior_mode = state.mode
            state.spray_on = False
            _mode_event(state, Mode.PAUSED, events)
            ack()
        else:
            nak("ILLEGAL")
    elif kind == "RESUME":
        if state.mode is Mode.PAUSED:
            _mode_event(state, state.prior_mode, events)
            ack()
        else:
            nak("ILLEGAL")
    elif kind == "ABORT":
        state.spray_on = False
        state.aborted = True
        state.column_index = 0
        state.wall_index = 0
        state.waypoint_index = 0
        state.burst_remaining_ms = 0
        state.shift_elapsed_ms = 0
        state.jog_dx_mm = 0.0
        state.jog_dy_mm = 0.0
        if state.mode is not Mode.IDLE:
            _mode_event(state, Mode.IDLE, events)
        ack()
    elif kind == "JOG":
        if state.mode in (Mode.IDLE, Mode.PAUSED):
            dx, dy = {
                "UP": (0.0, cmd.amount_mm),
                "DOWN": (0.0, -cmd.amount_mm),
                "LEFT": (-cmd.amount_mm, 0.0),
                "RIGHT": (cmd.amount_mm, 0.0),
            }[cmd.direction]
            state.jog_dx_mm += dx
            state.jog_dy_mm += dy
            ack()
        else:
            nak("ILLEGAL")
    elif kind == "SPRAY":
        if cmd.on:
            if state.mode is Mode.DESCENDING:
                state.spray_gate = True
                ack()
            else:
                nak("SAFETY")
        else:
            state.spray_gate = False
            state.spray_on = False
            ack()
    elif kind == "SHIFT":
        if state.mode in (Mode.READY, Mode.DONE):
            state.shift_elapsed_ms = 0
            _mode_event(state, Mode.SHIFTING_WALL, events)
            ack()
        else:
            nak("ILLEGAL")
    elif kind == "SET":
        if cmd.key == "telemetry_ms":
            try:
                v = int(cmd.value)
            except ValueError:
                v = 0
            if v > 0:
                cfg.telemetry_ms = v
                ack()
            else:
                nak("BADARG")
        elif cmd.key == "margin_cm":
            try:
                v = float(cmd.value)
            except ValueError:
                v = -1.0
            if v > 0:
                cfg.margin_cm = v
                ack()
            else:
                nak("BADARG")
        else:
            nak("BADARG")
    elif kind == "GET_STATUS":
        ack()
        events.append(Event(state.t_ms, "status", state.mode.value))
    return state, events


def _quantized_steps(remaining_mm: float, cap: int, motor: MotorSpec) -> int:
    """Steps to move this tick toward a point remaining_mm away (unsigned)."""
    return min(cap, steps_for_distance(abs(remaining_mm), motor).steps)


def tick(state: ControllerState, plan: MissionPlan, sensors, dt_ms: int, cfg: ControllerConfig):
    """Advance the control law by one fixed timestep.

    Deterministic: identical (state, plan, sensor trace, dt) sequences give
    identical actuator and event traces. Returns (state, ActuatorCommand,
    events); the state object is mutated in place.
    """
    if dt_ms <= 0 or dt_ms != cfg.dt_ms:
        raise ValidationError(f"dt_ms {dt_ms} != configured timestep {cfg.dt_ms}")
    events = []
    step_x = 0
    step_y = 0
    servo = 0
    shift_on = False
    cap = max_steps_per_tick(cfg.motor, dt_ms)
    dps = distance_per_step(cfg.motor)
    half_step = dps / 2.0
    state.last_ultrasonic_cm = sensors.ultrasonic_cm

    if getattr(sensors, "fault", False) and state.mode is not Mode.FAULT:
        state.spray_on = False
        events.append(Event(state.t_ms, "fault", "sensor fault"))
        _mode_event(state, Mode.FAULT, events)

    # Obstacle guard: only the spraying descent reacts to short readings.
    if state.mode is Mode.DESCENDING or state.mode is Mode.OBSTACLE_HOLD:
        hold = obstacle_guard(sensors.ultrasonic_cm, cfg.wall_distance_cm, cfg.margin_cm)
        if hold and state.mode is Mode.DESCENDING:
            state.spray_on = False
            events.append(
                Event(state.t_ms, "obstacle",
                      f"HOLD x={state.x:.2f} y={state.y:.2f} ultra={sensors.ultrasonic_cm:.1f}")
            )
            _mode_event(state, Mode.OBSTACLE_HOLD, events)
        elif not hold and state.mode is Mode.OBSTACLE_HOLD:
            events.append(
                Event(state.t_ms, "obstacle",
                      f"CLEAR x={state.x:.2f} y={state.y:.2f} ultra={sensors.ultrasonic_cm:.1f}")
            )
            _mode_event(state, Mode.DESCENDING, events)
            # Bursts for waypoints passed while holding are skipped.
            if plan.mode == "burst":
                wps = burst_waypoints(plan)
                while (state.waypoint_index < len(wps)
                       and wps[state.waypoint_index] > state.y + half_step):
                    state.waypoint_index += 1

    mode = state.mode

    if mode in (Mode.IDLE, Mode.PAUSED):
        # Inert except for queued jogs (one axis per tick, speed-capped,
        # clamped to the travel rectangle).
        if abs(state.jog_dy_mm) > half_step:
            target = min(max(state.y + state.jog_dy_mm, plan.y_bottom_mm), plan.y_top_mm)
            delta = target - state.y
            n = _quantized_steps(delta, cap, cfg.motor)
            if n > 0:
                step_y = n if delta > 0 else -n
                state.jog_dy_mm -= step_y * dps
            else:
                state.jog_dy_mm = 0.0
        elif abs(state.jog_dx_mm) > half_step:
            target = min(max(state.x + state.jog_dx_mm, 0.0), cfg.wall_width_mm)
            delta = target - state.x
            n = _quantized_steps(delta, cap, cfg.motor)
            if n > 0:
                step_x = n if delta > 0 else -n
                state.jog_dx_mm -= step_x * dps
            else:
                state.jog_dx_mm = 0.0

    elif mode is Mode.READY:
        # Traverse to the current column start (used at mission begin and
        # after a wall shift); vertical alignment first, then lateral.
        target_x = plan.column_centers[state.column_index]
        dy = plan.y_top_mm - state.y
        dx = target_x - state.x
        n_y = _quantized_steps(dy, cap, cfg.motor)
        n_x = _quantized_steps(dx, cap, cfg.motor)
        if n_y > 0:
            step_y = n_y if dy > 0 else -n_y
        elif n_x > 0:
            step_x = n_x if dx > 0 else -n_x
        else:
            state.waypoint_index = 0
            _mode_event(state, Mode.DESCENDING, events)

    elif mode is Mode.DESCENDING:
        if plan.mode == "burst":
            wps = burst_waypoints(plan)
            if state.burst_remaining_ms > 0:
                state.spray_on = state.spray_gate
                servo = 90 if state.spray_on else 0
                state.burst_remaining_ms -= dt_ms
                if state.burst_remaining_ms <= 0:
                    state.burst_remaining_ms = 0
                    state.waypoint_index += 1
            elif state.waypoint_index >= len(wps) or sensors.limit_bottom:
                state.spray_on = False
                _mode_event(state, Mode.ASCENDING, events)
            else:
                state.spray_on = False
                remaining = state.y - wps[state.waypoint_index]
                n = _quantized_steps(remaining, cap, cfg.motor)
                if n > 0:
                    step_y = -n if remaining > 0 else n
                else:
                    # At the waypoint: open the valve for one burst.
                    events.append(
                        Event(state.t_ms, "burst",
                              f"{state.waypoint_index} y={state.y:.2f}")
                    )
                    state.burst_remaining_ms = BURST_MS
                    state.spray_on = state.spray_gate
                    servo = 90 if state.spray_on else 0
                    state.burst_remaining_ms -= dt_ms
                    if state.burst_remaining_ms <= 0:
                        state.burst_remaining_ms = 0
                        state.waypoint_index += 1
        else:
            remaining = state.y - plan.y_bottom_mm
            n = _quantized_steps(remaining, cap, cfg.motor)
            if n == 0 or sensors.limit_bottom:
                state.spray_on = False
                _mode_event(state, Mode.ASCENDING, events)
            else:
                state.spray_on = state.spray_gate
                servo = 90 if state.spray_on else 0
                step_y = -n if remaining > 0 else n

    elif mode is Mode.OBSTACLE_HOLD:
        # Keep descending dry until the readings clear or the column ends.
        remaining = state.y - plan.y_bottom_mm
        n = _quantized_steps(remaining, cap, cfg.motor)
        if n == 0 or sensors.limit_bottom:
            _mode_event(state, Mode.ASCENDING, events)
        else:
            step_y = -n

    elif mode is Mode.ASCENDING:
        remaining = plan.y_top_mm - state.y
        n = _quantized_steps(remaining, cap, cfg.motor)
        if n == 0 or sensors.limit_top:
            if state.column_index + 1 < len(plan.column_centers):
                _mode_event(state, Mode.SHIFTING_COLUMN, events)
            elif state.wall_index + 1 < plan.walls:
                state.shift_elapsed_ms = 0
                events.append(Event(state.t_ms, "wall", f"finished {state.wall_index}"))
                _mode_event(state, Mode.SHIFTING_WALL, events)
            else:
                _mode_event(state, Mode.DONE, events)
        else:
            step_y = n

    elif mode is Mode.SHIFTING_COLUMN:
        target = plan.column_centers[state.column_index + 1]
        delta = target - state.x
        n = _quantized_steps(delta, cap, cfg.motor)
        if n == 0:
            state.column_index += 1
            state.waypoint_index = 0
            events.append(
                Event(state.t_ms, "column", f"{state.column_index} x={state.x:.2f}")
            )
            _mode_event(state, Mode.DESCENDING, events)
        else:
            step_x = n if delta > 0 else -n

    elif mode is Mode.SHIFTING_WALL:
        shift_on = True
        state.shift_elapsed_ms += dt_ms
        if state.shift_elapsed_ms >= cfg.shift_ms:
            state.wall_index += 1
            state.column_index = 0
            state.waypoint_index = 0
            state.shift_elapsed_ms = 0
            events.append(Event(state.t_ms, "wall", f"shifted to {state.wall_index}"))
            _mode_event(state, Mode.READY, events)

    # DONE / FAULT: inert.

    if servo != 90:
        state.spray_on = False

    # Dead-reckon the commanded motion.
    state.x += step_x * dps
    state.y += step_y * dps
    state.t_ms += dt_ms
    return state, ActuatorCommand(step_x, step_y, servo, shift_on), events
