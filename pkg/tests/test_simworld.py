"""Plant simulation: rig motion, paint deposition, sensors, scenario files."""

import json
import math

import numpy as np
import pytest

from paintrig.controller import ActuatorCommand
from paintrig.errors import ValidationError
from paintrig.kinematics import distance_per_step, max_steps_per_tick
from paintrig.simworld import (
    ULTRA_MAX_CM,
    ULTRA_MIN_CM,
    Obstacle,
    ScenarioConfig,
    current_reading,
    inject_obstacle,
    loads_scenario,
    read_ultrasonic,
    world_new,
    world_step,
)

from helpers import make_scenario

IDLE_ACT = ActuatorCommand(0, 0, 0, False)
DPS = distance_per_step(make_scenario().motor)


def step_n(world, act, n):
    reading = None
    for _ in range(n):
        world, reading = world_step(world, act, world.cfg.dt_ms)
    return world, reading


# --- pose and motion --------------------------------------------------------


def test_default_start_pose_top_right_column():
    world = world_new(make_scenario())
    assert (world.rig_x, world.rig_y) == (95.0, 100.0)


def test_start_pose_narrow_wall_centred():
    scn = make_scenario(wall={"width_mm": 8.0, "height_mm": 100.0})
    world = world_new(scn)
    assert world.rig_x == 4.0


def test_fifty_steps_down_move_half_millimetre():
    world = world_new(make_scenario())
    world, _ = world_step(world, ActuatorCommand(0, -50, 0, False), 10)
    assert world.rig_y == pytest.approx(99.5, abs=1e-3)
    assert world.rig_x == 95.0


def test_pose_follows_commanded_steps_exactly():
    world = world_new(make_scenario(), start_x=50.0, start_y=50.0)
    world, _ = world_step(world, ActuatorCommand(7, 0, 0, False), 10)
    world, _ = world_step(world, ActuatorCommand(0, -13, 0, False), 10)
    assert world.rig_x == pytest.approx(50.0 + 7 * DPS, abs=1e-12)
    assert world.rig_y == pytest.approx(50.0 - 13 * DPS, abs=1e-12)


def test_step_rejects_mismatched_dt():
    world = world_new(make_scenario())
    with pytest.raises(ValidationError):
        world_step(world, IDLE_ACT, 20)


def test_pose_clamped_to_wall_rectangle():
    world = world_new(make_scenario(), start_x=0.1, start_y=0.1)
    world, _ = step_n(world, ActuatorCommand(-32, 0, 0, False), 10)
    assert world.rig_x == 0.0
    world, _ = step_n(world, ActuatorCommand(0, -32, 0, False), 10)
    assert world.rig_y == 0.0


def test_overspeed_command_flags_fault():
    world = world_new(make_scenario())
    cap = max_steps_per_tick(world.cfg.motor, 10)
    y0 = world.rig_y
    world, reading = world_step(world, ActuatorCommand(0, -(cap + 10), 0, False), 10)
    assert reading.fault is True
    # displacement still follows the commanded steps
    assert world.rig_y == pytest.approx(y0 - (cap + 10) * DPS)


def test_within_speed_no_fault():
    world = world_new(make_scenario())
    _, reading = world_step(world, ActuatorCommand(0, -32, 0, False), 10)
    assert reading.fault is False


def test_limit_switches_at_edges():
    scn = make_scenario()
    world = world_new(scn, start_x=0.0, start_y=0.0)
    r = current_reading(world)
    assert r.limit_bottom and r.limit_left
    assert not r.limit_top and not r.limit_right
    world = world_new(scn, start_x=100.0, start_y=100.0)
    r = current_reading(world)
    assert r.limit_top and r.limit_right
    assert not r.limit_bottom and not r.limit_left


def test_clock_advances_with_ticks():
    world = world_new(make_scenario())
    world, reading = step_n(world, IDLE_ACT, 7)
    assert world.clock_ms == 70
    assert reading.t_ms == 70


# --- deposition -------------------------------------------------------------


def test_dry_motion_paints_nothing():
    world = world_new(make_scenario())
    world, _ = step_n(world, ActuatorCommand(0, -32, 0, False), 100)
    assert world.grid.painted_cells == 0


def test_spraying_descent_paints_swept_band():
    world = world_new(make_scenario())
    world, _ = step_n(world, ActuatorCommand(0, -32, 90, False), 100)
    # band is stroke-wide around the column and exactly the swept rows
    cols = world.grid.coats.any(axis=0)
    assert list(np.nonzero(cols)[0]) == list(range(90, 100))
    rows = world.grid.coats.any(axis=1)
    swept = 100.0 - world.rig_y
    assert abs(rows.sum() - swept) <= 1.0


def test_burst_stamp_square_on_rising_edge():
    world = world_new(make_scenario(), start_x=50.0, start_y=50.0)
    world, _ = world_step(world, ActuatorCommand(0, 0, 90, False), 10)
    assert world.grid.painted_cells == 100  # 10 x 10 mm at 1 mm cells
    assert world.grid.coats[45:55, 45:55].all()


def test_burst_stamp_only_once_per_edge():
    world = world_new(make_scenario(), start_x=50.0, start_y=50.0)
    world, _ = step_n(world, ActuatorCommand(0, 0, 90, False), 5)
    assert world.grid.coats.max() == 1
    world, _ = world_step(world, IDLE_ACT, 10)  # valve closes
    world, _ = world_step(world, ActuatorCommand(0, 0, 90, False), 10)
    assert world.grid.coats.max() == 2


def test_painted_cells_never_decrease():
    world = world_new(make_scenario())
    prev = 0
    acts = [ActuatorCommand(0, -20, 90, False), IDLE_ACT,
            ActuatorCommand(-10, 0, 0, False), ActuatorCommand(0, 0, 90, False)]
    for i in range(200):
        world, _ = world_step(world, acts[i % len(acts)], 10)
        assert world.grid.painted_cells >= prev
        prev = world.grid.painted_cells


# --- ultrasonic sensor ------------------------------------------------------


def test_zero_noise_reads_wall_distance_exactly():
    world = world_new(make_scenario(wall={"distance_cm": 75.0}))
    assert read_ultrasonic(world) == 75.0


def test_noise_stays_within_bound():
    world = world_new(make_scenario(sim={"noise_cm": 2.0}))
    readings = np.array([read_ultrasonic(world) for _ in range(5000)])
    assert (readings >= 98.0).all() and (readings <= 102.0).all()
    assert readings.std() > 0.5  # actually spread out, not constant


def test_noise_stream_is_seed_deterministic():
    a = world_new(make_scenario(sim={"noise_cm": 2.0, "seed": 42}))
    b = world_new(make_scenario(sim={"noise_cm": 2.0, "seed": 42}))
    c = world_new(make_scenario(sim={"noise_cm": 2.0, "seed": 43}))
    ra = [read_ultrasonic(a) for _ in range(500)]
    rb = [read_ultrasonic(b) for _ in range(500)]
    rc = [read_ultrasonic(c) for _ in range(500)]
    assert ra == rb
    assert ra != rc


def test_obstacle_shortens_reading():
    scn = make_scenario(obstacle=[
        {"x_mm": 40.0, "y_mm": 40.0, "width_mm": 20.0, "height_mm": 20.0,
         "protrusion_cm": 40.0},
    ])
    world = world_new(scn, start_x=50.0, start_y=50.0)
    assert read_ultrasonic(world) == 60.0


def test_obstacle_reading_with_noise_in_band():
    scn = make_scenario(
        sim={"noise_cm": 2.0},
        obstacle=[{"x_mm": 40.0, "y_mm": 40.0, "width_mm": 20.0,
                   "height_mm": 20.0, "protrusion_cm": 40.0}],
    )
    world = world_new(scn, start_x=50.0, start_y=50.0)
    readings = [read_ultrasonic(world) for _ in range(2000)]
    assert all(58.0 <= r <= 62.0 for r in readings)


def test_beam_halfwidth_inflates_obstacle_box():
    scn = make_scenario(obstacle=[
        {"x_mm": 40.0, "y_mm": 40.0, "width_mm": 20.0, "height_mm": 20.0},
    ])
    # 4 mm outside the box edge but inside the 5 mm beam halfwidth
    world = world_new(scn, start_x=64.0, start_y=50.0)
    assert read_ultrasonic(world) == 70.0  # default protrusion 30 cm
    # 6 mm outside: the cone no longer clips the protrusion
    world = world_new(scn, start_x=66.0, start_y=50.0)
    assert read_ultrasonic(world) == 100.0


def test_reading_clamped_to_sensor_range():
    scn = make_scenario(obstacle=[
        {"x_mm": 40.0, "y_mm": 40.0, "width_mm": 20.0, "height_mm": 20.0,
         "protrusion_cm": 99.5},
    ])
    world = world_new(scn, start_x=50.0, start_y=50.0)
    assert read_ultrasonic(world) == ULTRA_MIN_CM
    assert ULTRA_MIN_CM == 2.0 and ULTRA_MAX_CM == 400.0


def test_inject_obstacle_bounds_checked():
    world = world_new(make_scenario())
    inject_obstacle(world, Obstacle(10.0, 10.0, 5.0, 5.0))
    assert len(world.obstacles) == 1
    with pytest.raises(ValidationError):
        inject_obstacle(world, Obstacle(98.0, 10.0, 5.0, 5.0))
    with pytest.raises(ValidationError):
        inject_obstacle(world, Obstacle(-1.0, 10.0, 5.0, 5.0))


# --- wall shifting ----------------------------------------------------------


def test_shift_falling_edge_advances_wall():
    world = world_new(make_scenario(wall={"count": 2}))
    world, _ = step_n(world, ActuatorCommand(0, 0, 0, True), 50)
    assert world.active_wall == 0  # still shifting
    world, _ = world_step(world, IDLE_ACT, 10)
    assert world.active_wall == 1


def test_shift_saturates_at_last_wall():
    world = world_new(make_scenario(wall={"count": 2}))
    for _ in range(3):
        world, _ = step_n(world, ActuatorCommand(0, 0, 0, True), 5)
        world, _ = world_step(world, IDLE_ACT, 10)
    assert world.active_wall == 1
    assert len(world.walls) == 2


def test_walls_have_independent_grids():
    world = world_new(make_scenario(wall={"count": 2}), start_x=50.0, start_y=50.0)
    world, _ = world_step(world, ActuatorCommand(0, 0, 90, False), 10)
    world, _ = world_step(world, ActuatorCommand(0, 0, 0, True), 10)
    world, _ = world_step(world, IDLE_ACT, 10)
    assert world.walls[0].painted_cells == 100
    assert world.walls[1].painted_cells == 0
    assert world.grid is world.walls[1]


# --- scenario config --------------------------------------------------------


def test_scenario_defaults():
    scn = ScenarioConfig.from_dict({
        "wall": {"width_mm": 100.0, "height_mm": 100.0},
        "sim": {"seed": 0},
    })
    assert scn.stroke.width_mm == 10.0
    assert scn.stroke.spacing_mm == 5.5
    assert scn.dt_ms == 10 and scn.seed == 0
    assert scn.wall_distance_cm == 100.0
    assert math.isinf(scn.nozzle_reach_mm)


def test_scenario_requires_explicit_seed():
    # reproducibility hinges on the seed, so it may not be implicit
    with pytest.raises(ValidationError) as err:
        ScenarioConfig.from_dict({"wall": {"width_mm": 100.0, "height_mm": 100.0}})
    assert "sim.seed" in str(err.value)


def test_scenario_unknown_key_names_path():
    with pytest.raises(ValidationError) as err:
        ScenarioConfig.from_dict({"wall": {"width_mm": 1.0, "height_mirror": 2.0}})
    assert "wall.height_mirror" in str(err.value)


def test_scenario_spacing_and_ratio_conflict():
    with pytest.raises(ValidationError):
        ScenarioConfig.from_dict({
            "wall": {"width_mm": 100.0, "height_mm": 100.0},
            "stroke": {"spacing_mm": 5.5, "overlap_ratio": 0.45},
        })


def test_scenario_overlap_ratio_sets_spacing():
    scn = ScenarioConfig.from_dict({
        "wall": {"width_mm": 100.0, "height_mm": 100.0},
        "stroke": {"width_mm": 10.0, "overlap_ratio": 0.45},
        "sim": {"seed": 0},
    })
    assert scn.stroke.spacing_mm == pytest.approx(5.5)


def test_scenario_telemetry_must_align_with_tick():
    with pytest.raises(ValidationError):
        make_scenario(sim={"telemetry_ms": 105})


def test_scenario_obstacle_outside_wall_rejected():
    with pytest.raises(ValidationError) as err:
        make_scenario(obstacle=[{"x_mm": 95.0, "y_mm": 0.0,
                                 "width_mm": 10.0, "height_mm": 5.0}])
    assert "obstacle" in str(err.value)


def test_scenario_canonical_json_round_trip():
    scn = make_scenario(sim={"seed": 9}, wall={"nozzle_reach_mm": 80.0})
    text = scn.canonical_json()
    again = ScenarioConfig.from_canonical(json.loads(text))
    assert again == scn
    assert again.canonical_json() == text
    assert len(scn.digest()) == 64


def test_scenario_digest_tracks_content():
    a = make_scenario(sim={"seed": 1})
    b = make_scenario(sim={"seed": 2})
    assert a.digest() != b.digest()
    assert a.digest() == make_scenario(sim={"seed": 1}).digest()


def test_scenario_from_toml_text():
    scn = loads_scenario(
        """
        [wall]
        width_mm = 457.0
        height_mm = 457.0

        [stroke]
        width_mm = 10.0
        spacing_mm = 5.5

        [sim]
        seed = 7
        noise_cm = 2.0

        [[obstacle]]
        x_mm = 100.0
        y_mm = 200.0
        width_mm = 50.0
        height_mm = 40.0
        """
    )
    assert scn.wall_width_mm == 457.0
    assert scn.seed == 7
    assert len(scn.obstacles) == 1
    assert scn.obstacles[0].protrusion_cm == 30.0
