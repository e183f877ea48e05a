"""Paint deposition onto a discretized wall and coverage/quality metrics.

The wall is a grid of square cells accumulating coat counts. A stroke is a
hard-edged rectangle; a cell takes a coat iff its centre falls inside the
half-open footprint, which makes abutting strokes gap-free without double
counting. Overlap ratio is (width - spacing) / width.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError


@dataclass(frozen=True)
class StrokeSpec:
    """One vertical spray pass: footprint width, lateral spacing between
    consecutive pass centres, and the nominal time of a full pass."""

    width_mm: float = 10.0
    spacing_mm: float = 5.5
    stroke_time_s: float = 35.0

    def __post_init__(self):
        if self.width_mm <= 0:
            raise ValidationError("width_mm must be > 0")
        if self.spacing_mm < 0:
            raise ValidationError("spacing_mm must be >= 0")
        if self.stroke_time_s <= 0:
            raise ValidationError("stroke_time_s must be > 0")

    @property
    def overlap_ratio(self) -> float:
        return overlap_ratio(self.width_mm, self.spacing_mm)


class Quality(enum.IntEnum):
    """Paint quality grade, ordered."""

    MEDIUM = 0
    MODERATE_HIGH = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return {"MEDIUM": "Medium", "MODERATE_HIGH": "Moderate-High", "HIGH": "High"}[
            self.name
        ]


# Classifier thresholds on overlap ratio. Calibrated against the bench rows
# below: 0.20-0.25 graded Medium, 0.30-0.40 Moderate-High, 0.45+ High.
MODERATE_HIGH_MIN = 0.30
HIGH_MIN = 0.45

# Bench rows (sensor value cm, overlap ratio, stroke time s, grade). The
# sensor column shows no functional relation to the grade; it is carried as
# recorded data only.
QUALITY_BENCH_ROWS = (
    (57.10, 0.20, 30, Quality.MEDIUM),
    (139.18, 0.25, 31, Quality.MEDIUM),
    (102.18, 0.30, 32, Quality.MODERATE_HIGH),
    (76.46, 0.32, 32, Quality.MODERATE_HIGH),
    (58.71, 0.35, 33, Quality.MODERATE_HIGH),
    (127.42, 0.40, 34, Quality.MODERATE_HIGH),
    (121.52, 0.45, 35, Quality.HIGH),
    (129.17, 0.45, 35, Quality.HIGH),
    (104.49, 0.50, 36, Quality.HIGH),
    (104.88, 0.55, 38, Quality.HIGH),
)

# Recorded (sensor value cm, overlap ratio) pairs from bench runs. No
# functional model is known for these; they are data, not a law.
SENSOR_OVERLAP_SAMPLES = (
    (51.88, 0.57),
    (86.37, 0.00),
    (96.15, 0.98),
    (110.28, 0.98),
    (147.86, 0.98),
)


def overlap_ratio(width_mm: float, spacing_mm: float) -> float:
    """Fraction of each stroke overlapping its neighbour: (width - spacing) / width.

    Negative when spacing exceeds width, i.e. consecutive strokes leave a gap.
    """
    if width_mm <= 0:
        raise ValidationError("width_mm must be > 0")
    if spacing_mm < 0:
        raise ValidationError("spacing_mm must be >= 0")
    return (width_mm - spacing_mm) / width_mm


def spacing_for_overlap(width_mm: float, ratio: float) -> float:
    """Inverse of overlap_ratio: the spacing that yields the requested ratio."""
    if width_mm <= 0:
        raise ValidationError("width_mm must be > 0")
    if not (0.0 <= ratio <= 1.0):
        raise ValidationError("ratio must be in [0, 1]")
    return width_mm * (1.0 - ratio)


def classify_quality(ratio: float, stroke_time_s: float) -> Quality:
    """Grade coverage by overlap ratio (stroke time is recorded, not used)."""
    if not (0.0 <= ratio <= 1.0):
        raise ValidationError("ratio must be in [0, 1]")
    if stroke_time_s <= 0:
        raise ValidationError("stroke_time_s must be > 0")
    if ratio >= HIGH_MIN:
        return Quality.HIGH
    if ratio >= MODERATE_HIGH_MIN:
        return Quality.MODERATE_HIGH
    return Quality.MEDIUM


@dataclass
class WallGrid:
    """Discretized wall surface; coats[r, c] counts coats on the cell whose
    centre is ((c + 0.5) * cell, (r + 0.5) * cell), row 0 at the wall bottom.
    """

    width_mm: float
    height_mm: float
    cell_mm: float
    coats: np.ndarray
    painted_cells: int = 0

    @classmethod
    def new(cls, width_mm: float, height_mm: float, cell_mm: float = 1.0) -> "WallGrid":
        if width_mm <= 0 or height_mm <= 0:
            raise ValidationError("wall dimensions must be > 0")
        if cell_mm <= 0:
            raise ValidationError("cell_mm must be > 0")
        cols = width_mm / cell_mm
        rows = height_mm / cell_mm
        if abs(cols - round(cols)) > 1e-6 or abs(rows - round(rows)) > 1e-6:
            raise ValidationError("wall dimensions must be exact multiples of cell_mm")
        coats = np.zeros((round(rows), round(cols)), dtype=np.uint32)
        return cls(width_mm, height_mm, cell_mm, coats)

    @property
    def total_cells(self) -> int:
        return self.coats.size

    @property
    def painted_fraction(self) -> float:
        return self.painted_cells / self.total_cells


def _cell_range(lo: float, hi: float, cell: float, n: int):
    """Indices of cells whose centre lies in [lo, hi), clipped to [0, n)."""
    i0 = math.ceil(lo / cell - 0.5)
    i1 = math.ceil(hi / cell - 0.5)
    return max(i0, 0), min(i1, n)


def apply_stroke(
    grid: WallGrid, x_center_mm: float, y_from_mm: float, y_to_mm: float, width_mm: float
) -> WallGrid:
    """Deposit one coat over the footprint [x-w/2, x+w/2) x [y_from, y_to).

    Mutates the grid in place (and returns it); parts that hang past the
    wall edges are clipped, so a fully off-wall stroke is a no-op.
    """
    if width_mm <= 0:
        raise ValidationError("width_mm must be > 0")
    if y_from_mm > y_to_mm:
        raise ValidationError("y_from_mm must be <= y_to_mm")
    rows, cols = grid.coats.shape
    c0, c1 = _cell_range(x_center_mm - width_mm / 2, x_center_mm + width_mm / 2,
                         grid.cell_mm, cols)
    r0, r1 = _cell_range(y_from_mm, y_to_mm, grid.cell_mm, rows)
    if c0 < c1 and r0 < r1:
        grid.painted_cells += kernels.deposit(grid.coats, r0, r1, c0, c1)
    return grid


@dataclass(frozen=True)
class CoverageReport:
    """Coverage statistics over a wall grid plus stroke placement deviation."""

    painted_fraction: float
    mean_coats: float
    max_coats: int
    unpainted_bands: tuple  # ((y_lo_mm, y_hi_mm), ...) full-width zero-coat bands
    deviation_mm: float  # population std dev of realized - planned stroke centres

    def to_dict(self) -> dict:
        return {
            "painted_fraction": self.painted_fraction,
            "mean_coats": self.mean_coats,
            "max_coats": self.max_coats,
            "unpainted_bands": [list(b) for b in self.unpainted_bands],
            "deviation_mm": self.deviation_mm,
        }


def coverage_report(grid: WallGrid, planned_centers_mm=(), realized_centers_mm=()) -> CoverageReport:
    """Summarize grid coverage and how far realized stroke centres strayed."""
    planned = np.asarray(planned_centers_mm, dtype=np.float64)
    realized = np.asarray(realized_centers_mm, dtype=np.float64)
    if planned.shape != realized.shape:
        raise ValidationError("planned and realized centre lists differ in length")
    painted, total_coats, max_coats = kernels.grid_stats(grid.coats)
    deviation = float(np.std(realized - planned)) if planned.size else 0.0

    bands = []
    row_painted = grid.coats.any(axis=1)
    start = None
    for r, p in enumerate(row_painted):
        if not p and start is None:
            start = r
        elif p and start is not None:
            bands.append((start * grid.cell_mm, r * grid.cell_mm))
            start = None
    if start is not None:
        bands.append((start * grid.cell_mm, len(row_painted) * grid.cell_mm))

    return CoverageReport(
        painted_fraction=painted / grid.total_cells,
        mean_coats=total_coats / grid.total_cells,
        max_coats=max_coats,
        unpainted_bands=tuple(bands),
        deviation_mm=deviation,
    )


def grid_to_pgm(grid: WallGrid) -> str:
    """Render coat counts as ASCII PGM (P2), coats clamped to 255, top row first."""
    img = np.minimum(grid.coats[::-1], 255)
    rows, cols = img.shape
    lines = ["P2", f"{cols} {rows}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in img)
    return "\n".join(lines) + "\n"


def grid_to_csv(grid: WallGrid) -> str:
    """Coat counts as CSV, one line per grid row, top row first."""
    return "\n".join(",".join(str(v) for v in row) for row in grid.coats[::-1]) + "\n"
