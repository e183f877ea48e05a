"""Shared builders for the test suite."""

from paintrig.controller import Command
from paintrig.mission import MissionRunner
from paintrig.simworld import ScenarioConfig


def make_scenario(**overrides) -> ScenarioConfig:
    """A small 100x100mm wall with quiet sensors; override per test."""
    doc = {
        "wall": {"width_mm": 100.0, "height_mm": 100.0, "distance_cm": 100.0},
        "stroke": {"width_mm": 10.0, "spacing_mm": 5.5, "stroke_time_s": 35.0},
        "sim": {"dt_ms": 10, "seed": 0, "noise_cm": 0.0, "telemetry_ms": 100},
    }
    for section, vals in overrides.items():
        doc.setdefault(section, {} if not isinstance(vals, list) else [])
        if isinstance(vals, list):
            doc[section] = vals
        else:
            doc[section].update(vals)
    stroke = doc["stroke"]
    if "overlap_ratio" in stroke:  # the base spacing would conflict
        stroke.pop("spacing_mm", None)
    return ScenarioConfig.from_dict(doc)


def start(cmd_kind: str = "START") -> Command:
    return Command(kind=cmd_kind)


def run_to_completion(scenario: ScenarioConfig, max_ticks: int = 0):
    """Start a mission and run it until a terminal mode (or tick budget)."""
    runner = MissionRunner(scenario)
    runner.inject(Command(kind="START"))
    report = runner.run(max_ticks=max_ticks)
    return runner, report
