"""Mission execution and verification.

MissionRunner wires the controller to the simulated world with a fixed
timestep, records every event (including telemetry and inbound commands)
as JSON Lines, and produces a RunReport. Because the first log line embeds
the fully resolved scenario, a log is self-contained: replay() rebuilds
the runner from it, re-injects the logged commands at their original tick
times, and checks the regenerated stream is byte-identical.
"""

import json
import statistics
from dataclasses import dataclass
from pathlib import Path

from .controller import (
    BURST_MS,
    Command,
    ControllerConfig,
    Event,
    Mode,
    burst_waypoints,
    handle_command,
    initial_state,
    plan_mission,
    tick,
)
from .coverage import (
    CoverageReport,
    Quality,
    classify_quality,
    coverage_report,
    grid_to_csv,
    grid_to_pgm,
)
from .errors import ValidationError
from .kinematics import distance_per_step, max_steps_per_tick, position_error
from .protocol import (
    CommandError,
    TelemetryRecord,
    command_body,
    parse_command,
    telemetry_body,
)
from .simworld import ScenarioConfig, current_reading, world_new, world_step

TERMINAL_MODES = (Mode.DONE, Mode.FAULT)


@dataclass(frozen=True)
class RunReport:
    """End-of-mission summary written as report.json."""

    scenario_digest: str
    outcome: str  # DONE | FAULT | TIMEOUT | RUNNING
    coverage: CoverageReport
    quality: Quality
    overlap_ratio: float
    stroke_time_s: float
    max_position_error_mm: float
    tick_count: int
    wall_count: int
    unpaintable_bottom_mm: float
    event_log_path: str = ""

    def to_dict(self) -> dict:
        return {
            "scenario_digest": self.scenario_digest,
            "outcome": self.outcome,
            "coverage": self.coverage.to_dict(),
            "quality": self.quality.label,
            "overlap_ratio": self.overlap_ratio,
            "stroke_time_s": self.stroke_time_s,
            "max_position_error_mm": self.max_position_error_mm,
            "tick_count": self.tick_count,
            "wall_count": self.wall_count,
            "unpaintable_bottom_mm": self.unpaintable_bottom_mm,
            "event_log_path": self.event_log_path,
        }


def default_max_ticks(scenario: ScenarioConfig, plan, cfg: ControllerConfig) -> int:
    """Generous tick budget: planned travel at full speed plus burst dwell,
    wall shifts, and headroom. Hitting it means the mission is stuck."""
    v_mm = max_steps_per_tick(cfg.motor, cfg.dt_ms) * distance_per_step(cfg.motor)
    span = plan.y_top_mm - plan.y_bottom_mm
    ncol = len(plan.column_centers)
    travel = (2.0 * span * ncol + 2.0 * scenario.wall_width_mm) * plan.walls
    ticks = travel / v_mm
    if plan.mode == "burst":
        dwell = BURST_MS // cfg.dt_ms + 1
        ticks += len(burst_waypoints(plan)) * ncol * plan.walls * dwell
    ticks += plan.walls * (cfg.shift_ms // cfg.dt_ms + 1)
    return int(ticks * 1.5) + 20_000


class MissionRunner:
    """Deterministic single-threaded mission loop.

    Commands go in through inject(); time advances only through step().
    The event list is the complete, replayable record of the run.
    """

    def __init__(self, scenario: ScenarioConfig):
        self.scenario = scenario
        self.plan = plan_mission(
            scenario.wall_width_mm,
            scenario.wall_height_mm,
            scenario.stroke,
            nozzle_reach_mm=scenario.nozzle_reach_mm,
            mode=scenario.mode,
            walls=scenario.walls,
        )
        self.cfg = ControllerConfig(
            motor=scenario.motor,
            dt_ms=scenario.dt_ms,
            wall_width_mm=scenario.wall_width_mm,
            wall_height_mm=scenario.wall_height_mm,
            wall_distance_cm=scenario.wall_distance_cm,
            margin_cm=scenario.margin_cm,
            shift_ms=scenario.shift_ms,
            telemetry_ms=scenario.telemetry_ms,
        )
        if max_steps_per_tick(self.cfg.motor, self.cfg.dt_ms) < 1:
            raise ValidationError(
                "motor advances zero steps per tick at this rpm", field="sim.dt_ms"
            )
        self.world = world_new(scenario)
        self.state = initial_state(self.plan)
        self.tick_count = 0
        self.events = [Event(0, "run", scenario.canonical_json())]
        self._planned_centers = []
        self._realized_centers = []
        self._waypoint_errors = []
        self._descent_ms = []
        self._descent_start_ms = None
        self._outcome = ""
        self.sensors = current_reading(self.world)
        self._emit_telemetry()

    @property
    def finished(self) -> bool:
        return self.state.mode in TERMINAL_MODES

    def _emit_telemetry(self):
        rec = TelemetryRecord(
            t_ms=self.state.t_ms,
            mode=self.state.mode.value,
            x_mm=self.state.x,
            y_mm=self.state.y,
            spray=1 if self.state.spray_on else 0,
            ultra_cm=self.sensors.ultrasonic_cm,
            coverage_pct=self.world.grid.painted_fraction * 100.0,
        )
        self.events.append(Event(self.state.t_ms, "telem", telemetry_body(rec)))

    def inject(self, cmd: Command) -> Event:
        """Apply one operator command between ticks; returns its ACK/NAK event."""
        self.events.append(Event(self.state.t_ms, "cmd", command_body(cmd)))
        _, evs = handle_command(self.state, cmd, self.cfg)
        self.events.extend(evs)
        for ev in evs:
            if ev.kind in ("ack", "nak"):
                return ev
        return evs[-1]

    def step(self):
        """One fixed timestep: controller tick, then world update, then
        telemetry when an interval boundary is crossed."""
        _, act, evs = tick(self.state, self.plan, self.sensors, self.cfg.dt_ms, self.cfg)
        self._bookkeep(evs)
        self.events.extend(evs)
        _, self.sensors = world_step(self.world, act, self.cfg.dt_ms)
        self.tick_count += 1
        if self.state.t_ms % self.cfg.telemetry_ms == 0:
            self._emit_telemetry()
        return act

    def _bookkeep(self, evs):
        """Track waypoint accuracy and stroke durations off the event stream."""
        for ev in evs:
            if ev.kind == "burst":
                idx = int(ev.detail.split()[0])
                target = burst_waypoints(self.plan)[idx]
                self._waypoint_errors.append(position_error(target, self.state.y))
                continue
            if ev.kind != "mode":
                continue
            frm, _, to = ev.detail.partition("->")
            if to == "DESCENDING" and frm in ("READY", "SHIFTING_COLUMN"):
                planned = self.plan.column_centers[self.state.column_index]
                self._planned_centers.append(planned)
                self._realized_centers.append(self.state.x)
                self._waypoint_errors.append(position_error(planned, self.state.x))
                self._descent_start_ms = self.state.t_ms
            elif to == "ASCENDING":
                if self._descent_start_ms is not None:
                    self._descent_ms.append(self.state.t_ms - self._descent_start_ms)
                    self._descent_start_ms = None
                if frm == "DESCENDING" and self.plan.mode == "continuous":
                    self._waypoint_errors.append(
                        position_error(self.plan.y_bottom_mm, self.state.y)
                    )
            elif frm == "ASCENDING" and to in ("SHIFTING_COLUMN", "SHIFTING_WALL", "DONE"):
                self._waypoint_errors.append(
                    position_error(self.plan.y_top_mm, self.state.y)
                )

    def run(self, max_ticks: int = 0) -> RunReport:
        """Step until DONE/FAULT or the tick budget runs out."""
        limit = max_ticks or self.scenario.max_ticks or default_max_ticks(
            self.scenario, self.plan, self.cfg
        )
        while not self.finished and self.tick_count < limit:
            self.step()
        self.finalize()
        return self.report()

    def finalize(self):
        """Append the closing outcome event (once)."""
        if not self._outcome:
            self._outcome = self.state.mode.value if self.finished else "TIMEOUT"
            self.events.append(Event(self.state.t_ms, "end", self._outcome))

    def report(self, event_log_path: str = "") -> RunReport:
        ratio = self.plan.stroke.overlap_ratio
        stroke_time_s = (
            statistics.fmean(self._descent_ms) / 1000.0
            if self._descent_ms
            else self.plan.stroke.stroke_time_s
        )
        quality = classify_quality(min(max(ratio, 0.0), 1.0), stroke_time_s)
        cov = coverage_report(
            self.world.grid, self._planned_centers, self._realized_centers
        )
        return RunReport(
            scenario_digest=self.scenario.digest(),
            outcome=self._outcome or ("RUNNING" if not self.finished else self.state.mode.value),
            coverage=cov,
            quality=quality,
            overlap_ratio=ratio,
            stroke_time_s=stroke_time_s,
            max_position_error_mm=max(self._waypoint_errors, default=0.0),
            tick_count=self.tick_count,
            wall_count=len(self.world.walls),
            unpaintable_bottom_mm=self.plan.unpaintable_bottom_mm,
            event_log_path=event_log_path,
        )

    def event_lines(self):
        return [ev.to_json_line() for ev in self.events]


def write_artifacts(runner: MissionRunner, out_dir) -> dict:
    """Write events.jsonl, report.json, coverage.pgm and coverage.csv.

    Returns {name: path}. The report embeds the event log path so the
    artifact set is self-describing.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "events": out / "events.jsonl",
        "report": out / "report.json",
        "pgm": out / "coverage.pgm",
        "csv": out / "coverage.csv",
    }
    paths["events"].write_text("\n".join(runner.event_lines()) + "\n")
    # Relative name: report.json sits next to events.jsonl, and reports stay
    # byte-identical across output directories.
    report = runner.report(event_log_path=paths["events"].name)
    paths["report"].write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    paths["pgm"].write_text(grid_to_pgm(runner.world.grid))
    paths["csv"].write_text(grid_to_csv(runner.world.grid))
    return paths


@dataclass(frozen=True)
class ReplayResult:
    """Outcome of verifying an event log against a regenerated run."""

    status: str  # identical | divergence | truncated | unreadable
    line: int = 0  # 1-based first divergent line (divergence only)
    message: str = ""
    ticks: int = 0
    events: int = 0


def replay(log_path) -> ReplayResult:
    """Re-execute a logged run and compare streams byte for byte.

    The log's embedded scenario seeds a fresh world; logged commands are
    re-injected at their recorded times. Any edit to any line (telemetry
    included) shows up as a divergence at that line.
    """
    try:
        raw = Path(log_path).read_text().splitlines()
    except OSError as e:
        return ReplayResult("unreadable", message=str(e))
    if not raw:
        return ReplayResult("unreadable", message="empty log")
    try:
        header = Event.from_json_line(raw[0])
        if header.kind != "run":
            raise ValueError(f"first event kind {header.kind!r}, expected 'run'")
        scenario = ScenarioConfig.from_canonical(json.loads(header.detail))
    except (ValueError, KeyError, TypeError, ValidationError) as e:
        return ReplayResult("unreadable", message=f"bad run header: {e}")

    cmds = []
    for ln in raw[1:]:
        try:
            ev = Event.from_json_line(ln)
        except (ValueError, KeyError, TypeError):
            continue  # unparseable line: the line comparison will flag it
        if ev.kind == "cmd":
            cmds.append(ev)

    try:
        runner = MissionRunner(scenario)
    except ValidationError as e:
        return ReplayResult("unreadable", message=f"scenario rejected: {e}")
    limit = (scenario.max_ticks or default_max_ticks(scenario, runner.plan, runner.cfg))
    limit += len(raw)
    ci = 0
    while runner.tick_count < limit:
        while ci < len(cmds) and cmds[ci].t_ms <= runner.state.t_ms:
            try:
                cmd = parse_command(cmds[ci].detail)
            except CommandError as e:
                return ReplayResult(
                    "divergence",
                    line=raw.index(cmds[ci].to_json_line()) + 1 if cmds[ci].to_json_line() in raw else 0,
                    message=f"unreplayable command: {e}",
                )
            runner.inject(cmd)
            ci += 1
        if runner.finished and ci >= len(cmds):
            runner.finalize()
            break
        if len(runner.events) > len(raw):
            break  # already past the end of the log
        runner.step()

    gen = runner.event_lines()
    for i, line in enumerate(raw):
        if i >= len(gen):
            return ReplayResult(
                "divergence", line=i + 1, message="log continues past regenerated stream"
            )
        if gen[i] != line:
            return ReplayResult("divergence", line=i + 1, message=f"expected {gen[i]}")
    if len(gen) > len(raw):
        return ReplayResult(
            "truncated",
            line=len(raw),
            message=f"log ends after {len(raw)} events; run regenerates more",
            ticks=runner.tick_count,
            events=len(gen),
        )
    return ReplayResult("identical", ticks=runner.tick_count, events=len(gen))
