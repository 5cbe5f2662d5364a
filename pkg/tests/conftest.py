import numpy as np
import pytest

from fanoband.cube import (CubeDescriptor, SynthSpec, save_cube, save_labels,
                           synth_cube, write_descriptor)


@pytest.fixture(scope="session")
def small_scene():
    """Desk-scale synthetic scene shared across tests (in memory)."""
    return synth_cube(SynthSpec(n_classes=4, rows=24, cols=24,
                                informative_bands=3, copies_per_informative=1,
                                noise_bands=2, noise_level=0.6, seed=5))


@pytest.fixture(scope="session")
def scene_dir(tmp_path_factory, small_scene):
    """The small scene written to disk with sidecar descriptors."""
    cube, gt, roles = small_scene
    out = tmp_path_factory.mktemp("scene")
    cube_path = out / "cube.u16"
    desc = CubeDescriptor(cube.bands, cube.rows, cube.cols, "u16", "le", "bsq")
    save_cube(cube, cube_path, desc)
    write_descriptor(str(cube_path) + ".dsc", desc)
    gt_path = out / "gt.u8"
    save_labels(gt.labels, gt_path, dtype="u8")
    write_descriptor(str(gt_path) + ".dsc",
                     CubeDescriptor(1, gt.rows, gt.cols, "u8", "le", "bsq"))
    return {"dir": out, "cube": str(cube_path), "gt": str(gt_path),
            "n_classes": gt.n_classes}
