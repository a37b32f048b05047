import numpy as np
import pytest

import panogrid as pg

# (name, "PASS" | "FAIL") entries appended by the acceptance tests and
# echoed once at the end of the run
ACCEPTANCE_RESULTS: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, outcome in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"ACCEPTANCE {name}: {outcome}")


def synth_erp(height: int, seed: int = 0, channels: int = 3) -> pg.ErpImage:
    """Band-limited panorama: a smooth random function of the direction vector.

    Built from low-order terms in the unit direction (x, y, z), so the
    image is pole-consistent, wraps cleanly at the seam, and contains
    no frequencies near the pixel grid.
    """
    width = 2 * height
    jj, ii = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    lon, lat = pg.erp_lonlat_of_pixels(ii + 0.5, jj + 0.5, width, height)
    x = np.cos(lat) * np.cos(lon)
    y = np.cos(lat) * np.sin(lon)
    z = np.sin(lat)
    rng = np.random.default_rng(seed)
    chans = []
    for _ in range(channels):
        a = rng.normal(size=10) * 0.09
        f = (
            0.5
            + a[0] * np.sin(2.1 * x + a[9])
            + a[1] * np.cos(1.7 * y)
            + a[2] * np.sin(2.9 * z)
            + a[3] * x * y
            + a[4] * y * z
            + a[5] * x * z
            + a[6] * np.cos(3.1 * x * y)
            + a[7] * z
            + a[8] * np.sin(x + y + z)
        )
        chans.append(f)
    img = np.stack(chans, axis=-1)
    img = (img - img.min()) / (img.max() - img.min())
    return pg.ErpImage(img.astype(np.float32))


@pytest.fixture
def erp_small() -> pg.ErpImage:
    return synth_erp(64, seed=7)


@pytest.fixture
def erp_medium() -> pg.ErpImage:
    return synth_erp(128, seed=11)
