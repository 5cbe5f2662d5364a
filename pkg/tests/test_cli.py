import pytest

from fanoband.cli import main


def run_ok(args):
    assert main(args) == 0


def exit_code(args):
    with pytest.raises(SystemExit) as info:
        main(args)
    return info.value.code


class TestPipeline:
    def test_synth_rank_select_sweep_render(self, tmp_path, capsys):
        scene = tmp_path / "scene"
        run_ok(["synth", "--rows", "16", "--cols", "16", "--classes", "3",
                "--informative", "2", "--copies", "1", "--noise-bands", "1",
                "--noise-level", "0.4", "--seed", "2", "--out", str(scene)])
        cube = str(scene / "cube.u16")
        gt = str(scene / "gt.u8")

        run_ok(["rank", cube, gt, "--classes", "3", "--bins", "32",
                "--out", str(tmp_path / "rank")])
        assert (tmp_path / "rank" / "mi_by_rank.csv").exists()

        run_ok(["rank-approx", cube, "--range", "0:1", "--bins", "32",
                "--out", str(tmp_path / "approx")])
        assert (tmp_path / "approx" / "mi_approx_by_band.csv").exists()

        sel = tmp_path / "sel"
        run_ok(["select", cube, gt, "--classes", "3", "--threshold", "0.01",
                "--max-bands", "3", "--bins", "32", "--seed", "1",
                "--out", str(sel)])
        assert (sel / "trace.csv").exists()
        assert (sel / "run_record.txt").exists()
        out = capsys.readouterr().out
        assert "selected" in out and "test accuracy" in out

        run_ok(["sweep", cube, gt, "--classes", "3",
                "--thresholds", "0,0.01", "--checkpoints", "1,2",
                "--bins", "32", "--out", str(tmp_path / "sweep")])
        assert (tmp_path / "sweep" / "sweep_table.csv").exists()

        run_ok(["render", gt, "--second", str(sel / "c_est.u8"),
                "--out", str(tmp_path / "maps.ppm")])
        assert (tmp_path / "maps.ppm").read_bytes().startswith(b"P6\n")

    def test_select_outputs_are_deterministic(self, scene_dir, tmp_path):
        out = tmp_path / "sel"
        args = ["select", scene_dir["cube"], scene_dir["gt"],
                "--classes", str(scene_dir["n_classes"]),
                "--threshold", "0.005", "--max-bands", "4", "--bins", "32",
                "--out", str(out)]
        run_ok(args)
        first = {name: (out / name).read_bytes()
                 for name in ("trace.csv", "report_test.csv", "run_record.txt")}
        run_ok(args)
        for name, body in first.items():
            assert (out / name).read_bytes() == body


class TestExitCodes:
    def test_zero_max_bands_rejected_at_flag_validation(self, scene_dir, tmp_path):
        code = exit_code(["select", scene_dir["cube"], scene_dir["gt"],
                          "--threshold", "0", "--max-bands", "0",
                          "--out", str(tmp_path)])
        assert code == 1

    def test_missing_cube_is_io_exit(self, scene_dir, tmp_path):
        code = exit_code(["rank", str(tmp_path / "missing.u16"), scene_dir["gt"],
                          "--out", str(tmp_path / "r")])
        assert code == 2

    def test_unknown_command(self):
        assert exit_code(["frobnicate"]) == 1

    def test_malformed_threshold_list(self, scene_dir, tmp_path):
        code = exit_code(["sweep", scene_dir["cube"], scene_dir["gt"],
                          "--thresholds", "0,zero", "--checkpoints", "1",
                          "--out", str(tmp_path)])
        assert code == 1

    def test_malformed_band_range(self, scene_dir, tmp_path):
        code = exit_code(["rank-approx", scene_dir["cube"], "--range", "3",
                          "--out", str(tmp_path)])
        assert code == 1

    def test_bad_train_fraction(self, scene_dir, tmp_path):
        code = exit_code(["select", scene_dir["cube"], scene_dir["gt"],
                          "--threshold", "0", "--max-bands", "2",
                          "--train-fraction", "1.5", "--out", str(tmp_path)])
        assert code == 1

    def test_bad_classifier_is_validation_exit(self, scene_dir, tmp_path):
        code = exit_code(["select", scene_dir["cube"], scene_dir["gt"],
                          "--classes", str(scene_dir["n_classes"]),
                          "--threshold", "0", "--max-bands", "2",
                          "--classifier", "forest", "--out", str(tmp_path)])
        assert code == 1
