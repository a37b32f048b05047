import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import panogrid as pg
from panogrid.errors import DimensionError, LayoutError


def random_tangent_set(tile_px=16, seed=0, channels=3):
    rng = np.random.default_rng(seed)
    specs = pg.plane_layout_18(resolution=tile_px)
    images = [rng.random((tile_px, tile_px, channels)).astype(np.float32) for _ in specs]
    return pg.TangentSet(specs, images)


class TestMappings:
    def test_row_wise_is_identity(self):
        layout = pg.make_grid_layout("row_wise")
        assert layout.mapping == tuple(range(18))

    def test_column_wise(self):
        # cell (r, c) holds plane c*rows + r
        layout = pg.make_grid_layout("column_wise")
        expected = tuple(c * 3 + r for r in range(3) for c in range(6))
        assert layout.mapping == expected
        assert layout.mapping[:6] == (0, 3, 6, 9, 12, 15)

    def test_custom_polar_first(self):
        layout = pg.make_grid_layout("custom_polar_first")
        assert layout.mapping == (0, 1, 2, 15, 16, 17, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14)

    def test_custom_requires_3x6(self):
        with pytest.raises(LayoutError):
            pg.make_grid_layout("custom_polar_first", rows=2, cols=9)

    def test_unknown_ordering(self):
        with pytest.raises(LayoutError):
            pg.make_grid_layout("spiral")

    def test_mapping_must_be_permutation(self):
        with pytest.raises(LayoutError):
            pg.GridLayout(3, 6, 16, "row_wise", tuple([0] * 18))


class TestAssemble:
    def test_default_dimensions(self):
        ts = random_tangent_set(tile_px=192)
        grid = pg.assemble(ts, pg.make_grid_layout("custom_polar_first", tile_px=192))
        assert grid.shape == (576, 1152, 3)
        assert grid.dtype == np.float32

    def test_placement(self):
        # constant-valued tiles reveal exactly which plane lands where
        tile_px = 4
        specs = pg.plane_layout_18(resolution=tile_px)
        images = [np.full((tile_px, tile_px, 1), i / 20.0, dtype=np.float32) for i in range(18)]
        ts = pg.TangentSet(specs, images)
        for ordering in ("custom_polar_first", "row_wise", "column_wise"):
            layout = pg.make_grid_layout(ordering, tile_px=tile_px)
            grid = pg.assemble(ts, layout)
            for cell, plane_idx in enumerate(layout.mapping):
                r, c = divmod(cell, 6)
                block = grid[r * tile_px:(r + 1) * tile_px, c * tile_px:(c + 1) * tile_px]
                assert float(block.min()) == float(block.max()) == pytest.approx(plane_idx / 20.0)

    def test_polar_first_row_zero_is_polar(self):
        tile_px = 4
        specs = pg.plane_layout_18(resolution=tile_px)
        images = [np.full((tile_px, tile_px, 1), i / 20.0, dtype=np.float32) for i in range(18)]
        grid = pg.assemble(pg.TangentSet(specs, images),
                           pg.make_grid_layout("custom_polar_first", tile_px=tile_px))
        # first three cells: north polar planes 0..2, next three: south polar 15..17
        row0 = [float(grid[0, c * tile_px, 0]) for c in range(6)]
        assert row0 == pytest.approx([0.0, 1 / 20, 2 / 20, 15 / 20, 16 / 20, 17 / 20])

    def test_count_mismatch(self):
        ts = random_tangent_set(tile_px=8)
        with pytest.raises(LayoutError):
            pg.assemble(ts, pg.GridLayout(2, 6, 8, "row_wise", tuple(range(12))))

    def test_tile_px_mismatch(self):
        ts = random_tangent_set(tile_px=8)
        with pytest.raises(LayoutError):
            pg.assemble(ts, pg.make_grid_layout("row_wise", tile_px=16))


class TestSplit:
    @pytest.mark.parametrize("ordering", ["custom_polar_first", "row_wise", "column_wise"])
    def test_bijection_bit_identical(self, ordering):
        ts = random_tangent_set(tile_px=16, seed=3)
        layout = pg.make_grid_layout(ordering, tile_px=16)
        grid = pg.assemble(ts, layout)
        back = pg.split(grid, layout, ts.specs)
        for a, b in zip(ts.images, back.images):
            np.testing.assert_array_equal(a, b)
        regrid = pg.assemble(back, layout)
        np.testing.assert_array_equal(grid, regrid)

    def test_default_specs_for_18(self):
        ts = random_tangent_set(tile_px=16)
        layout = pg.make_grid_layout("custom_polar_first", tile_px=16)
        back = pg.split(pg.assemble(ts, layout), layout)
        assert len(back) == 18
        assert back.specs[0].resolution == 16

    def test_wrong_raster_shape(self):
        layout = pg.make_grid_layout("row_wise", tile_px=16)
        with pytest.raises(DimensionError):
            pg.split(np.zeros((48, 97, 1), dtype=np.float32), layout)

    def test_specs_count_mismatch(self):
        layout = pg.make_grid_layout("row_wise", tile_px=16)
        grid = np.zeros((48, 96, 1), dtype=np.float32)
        with pytest.raises(LayoutError):
            pg.split(grid, layout, pg.plane_layout_18(resolution=16)[:-1])

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2 ** 16), ordering=st.sampled_from(["custom_polar_first", "row_wise", "column_wise"]))
    def test_bijection_property(self, seed, ordering):
        ts = random_tangent_set(tile_px=4, seed=seed, channels=1)
        layout = pg.make_grid_layout(ordering, tile_px=4)
        back = pg.split(pg.assemble(ts, layout), layout, ts.specs)
        for a, b in zip(ts.images, back.images):
            np.testing.assert_array_equal(a, b)


class TestLayoutDocument:
    def test_grid_section_roundtrip(self, tmp_path):
        specs = pg.plane_layout_18(resolution=16)
        layout = pg.make_grid_layout("column_wise", tile_px=16)
        path = tmp_path / "layout.json"
        pg.save_full_layout(path, specs, layout)
        specs2, layout2 = pg.load_full_layout(path)
        assert layout2 == layout
        assert len(specs2) == 18

    def test_grid_section_optional(self, tmp_path):
        path = tmp_path / "layout.json"
        pg.save_full_layout(path, pg.plane_layout_18(resolution=16))
        _, layout = pg.load_full_layout(path)
        assert layout is None

    def test_dict_roundtrip(self):
        layout = pg.make_grid_layout("custom_polar_first")
        assert pg.grid_from_dict(pg.grid_to_dict(layout)) == layout
