"""Deterministic controller and simulator for a rope-suspended wall-painting rig.

The package splits into:

- kinematics: stepper geometry (steps per revolution, distance per step,
  quantized step planning, speed caps)
- coverage: stroke overlap math, the paint quality classifier, the wall
  grid with deposition and coverage reports, PGM/CSV export
- controller: the mission state machine (plan, tick law, command handling,
  obstacle guard)
- simworld: scenario files, the simulated rig/wall/sensor ground truth
- protocol: framed ASCII link codec, command grammar, telemetry format
- mission: the runner gluing controller to world, artifacts and replay
- cli: `paintrig run | serve | replay`
- bridge: real-time TCP/WebSocket server speaking the framed link
- kernels: numba-accelerated hot loops with a numpy fallback
  (select with PAINTRIG_NUMBA=0|1)
"""

from .controller import (
    ActuatorCommand,
    Command,
    ControllerConfig,
    ControllerState,
    Event,
    MissionPlan,
    Mode,
    burst_waypoints,
    handle_command,
    initial_state,
    obstacle_guard,
    plan_mission,
    tick,
)
from .coverage import (
    CoverageReport,
    Quality,
    StrokeSpec,
    WallGrid,
    apply_stroke,
    classify_quality,
    coverage_report,
    grid_to_csv,
    grid_to_pgm,
    overlap_ratio,
    spacing_for_overlap,
)
from .errors import ValidationError
from .kinematics import (
    DEFAULT_MOTOR,
    MotorSpec,
    StepPlan,
    distance_per_step,
    max_steps_per_tick,
    position_error,
    steps_for_distance,
    steps_for_distances,
    steps_per_revolution,
)
from .mission import MissionRunner, ReplayResult, RunReport, replay, write_artifacts
from .protocol import (
    BadChecksum,
    Frame,
    FrameError,
    FrameParser,
    Malformed,
    Oversize,
    TelemetryRecord,
    checksum,
    encode_frame,
    encode_telemetry,
    parse_command,
    parse_frame,
    parse_telemetry,
)
from .simworld import (
    Obstacle,
    ScenarioConfig,
    SensorReading,
    World,
    inject_obstacle,
    load_scenario,
    loads_scenario,
    read_ultrasonic,
    world_new,
    world_step,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
