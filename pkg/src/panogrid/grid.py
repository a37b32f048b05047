"""Packing tangent views into a single grid raster and back.

A grid layout is a rows x cols arrangement of square tiles plus a
permutation ``mapping`` where ``mapping[cell]`` is the plane index
stored at that cell (cells are numbered row-major).  Assembly and
splitting are exact inverses: tiles are copied, never resampled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, LayoutError
from .raster import TangentSet
from .sphere import TangentPlaneSpec, plane_layout_18, save_layout, load_layout

ORDERINGS = ("custom_polar_first", "row_wise", "column_wise")


@dataclass(frozen=True)
class GridLayout:
    """Placement of plane tiles in a grid raster."""

    rows: int
    cols: int
    tile_px: int
    ordering: str
    mapping: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.tile_px < 1:
            raise LayoutError(f"invalid grid dimensions {self.rows}x{self.cols} tile {self.tile_px}")
        n = self.rows * self.cols
        if sorted(self.mapping) != list(range(n)):
            raise LayoutError(f"mapping must be a permutation of 0..{n - 1}, got {self.mapping}")
        object.__setattr__(self, "mapping", tuple(int(m) for m in self.mapping))

    @property
    def count(self) -> int:
        return self.rows * self.cols


def _mapping_for(ordering: str, rows: int, cols: int) -> tuple[int, ...]:
    n = rows * cols
    if ordering == "row_wise":
        return tuple(range(n))
    if ordering == "column_wise":
        # cell (r, c) holds plane c*rows + r
        return tuple(c * rows + r for r in range(rows) for c in range(cols))
    if ordering == "custom_polar_first":
        if rows != 3 or cols != 6:
            raise LayoutError("custom_polar_first requires a 3x6 grid of 18 planes")
        # Plane order is north polar 0-2, upper equatorial 3-8, lower
        # equatorial 9-14, south polar 15-17.  Row 0 packs the polar
        # caps (north then south), rows 1-2 the equatorial bands, all
        # ascending in longitude.
        return tuple([0, 1, 2, 15, 16, 17] + list(range(3, 9)) + list(range(9, 15)))
    raise LayoutError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")


def make_grid_layout(ordering: str = "custom_polar_first", rows: int = 3, cols: int = 6,
                     tile_px: int = 192) -> GridLayout:
    """Build a GridLayout with the mapping implied by a named ordering."""
    return GridLayout(rows, cols, tile_px, ordering, _mapping_for(ordering, rows, cols))


def assemble(ts: TangentSet, layout: GridLayout) -> np.ndarray:
    """Pack a TangentSet into one (rows*tile, cols*tile, C) float32 raster."""
    if len(ts) != layout.count:
        raise LayoutError(f"layout holds {layout.count} tiles but set has {len(ts)}")
    for spec in ts.specs:
        if spec.resolution != layout.tile_px:
            raise LayoutError(f"plane resolution {spec.resolution} does not match tile_px {layout.tile_px}")
    t = layout.tile_px
    out = np.empty((layout.rows * t, layout.cols * t, ts.channels), dtype=np.float32)
    for cell, plane_idx in enumerate(layout.mapping):
        r, c = divmod(cell, layout.cols)
        out[r * t:(r + 1) * t, c * t:(c + 1) * t] = ts.images[plane_idx]
    return out


def split(grid: np.ndarray, layout: GridLayout,
          specs: list[TangentPlaneSpec] | None = None) -> TangentSet:
    """Cut a grid raster back into a TangentSet, inverting assemble.

    specs gives the plane geometry for the recovered tiles; when
    omitted, an 18-tile 3x6 layout falls back to the default sphere
    cover at the grid's tile resolution.
    """
    grid = np.asarray(grid)
    t = layout.tile_px
    expect = (layout.rows * t, layout.cols * t)
    if grid.ndim != 3 or grid.shape[:2] != expect:
        raise DimensionError(f"grid raster shape {grid.shape} does not match layout {expect} + channels")
    if specs is None:
        if layout.count != 18:
            raise LayoutError("specs are required for non-default layouts")
        specs = plane_layout_18(resolution=t)
    if len(specs) != layout.count:
        raise LayoutError(f"{len(specs)} specs for a layout of {layout.count} tiles")
    images: list[np.ndarray | None] = [None] * layout.count
    for cell, plane_idx in enumerate(layout.mapping):
        r, c = divmod(cell, layout.cols)
        images[plane_idx] = np.ascontiguousarray(grid[r * t:(r + 1) * t, c * t:(c + 1) * t])
    return TangentSet(specs, images)  # type: ignore[arg-type]


def grid_to_dict(layout: GridLayout) -> dict:
    """Grid section of the layout JSON document."""
    return {
        "rows": layout.rows,
        "cols": layout.cols,
        "tile_px": layout.tile_px,
        "ordering": layout.ordering,
        "mapping": list(layout.mapping),
    }


def grid_from_dict(d: dict) -> GridLayout:
    return GridLayout(int(d["rows"]), int(d["cols"]), int(d["tile_px"]),
                      str(d["ordering"]), tuple(d["mapping"]))


def save_full_layout(path, specs: list[TangentPlaneSpec], layout: GridLayout | None = None) -> None:
    """Write planes plus an optional grid section to a layout JSON file."""
    save_layout(path, specs, grid_to_dict(layout) if layout is not None else None)


def load_full_layout(path) -> tuple[list[TangentPlaneSpec], GridLayout | None]:
    """Read a layout JSON file; the grid section is optional."""
    specs, grid_section = load_layout(path)
    return specs, grid_from_dict(grid_section) if grid_section is not None else None
