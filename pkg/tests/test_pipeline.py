import csv
import json

import numpy as np
import pytest

from leafmetric.cli import main
from leafmetric.errors import ConfigError, DimensionMismatch
from leafmetric.pipeline import PipelineConfig, render_overlay, run_pipeline
from leafmetric.raster import RgbImage, decode_image
from leafmetric.report import report_dict
from leafmetric.segmentation import BinaryMask

from conftest import png_bytes, rect_canvas


def black(h, w):
    return RgbImage(np.zeros((h, w, 3), dtype=np.uint8))


def test_overlay_empty_mask_is_identity():
    img = black(4, 6)
    out = render_overlay(img, BinaryMask(np.zeros((4, 6), dtype=bool)), (255, 0, 0))
    assert np.array_equal(out.pixels, img.pixels)


def test_overlay_full_mask_blend():
    out = render_overlay(black(2, 2), BinaryMask(np.ones((2, 2), dtype=bool)), (255, 0, 0))
    assert np.array_equal(out.pixels, np.broadcast_to([128, 0, 0], (2, 2, 3)))


def test_overlay_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        render_overlay(black(2, 2), BinaryMask(np.ones((2, 3), dtype=bool)), (0, 0, 255))


def test_overlay_preserves_untinted_pixels():
    rng = np.random.default_rng(2)
    arr = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    bits = rng.random((8, 8)) < 0.5
    out = render_overlay(RgbImage(arr), BinaryMask(bits), (0, 255, 0))
    assert np.array_equal(out.pixels[~bits], arr[~bits])
    assert out.width == 8 and out.height == 8


def test_run_pipeline_rectangle(tmp_path, rect_image_file):
    cfg = PipelineConfig(inputs=[str(rect_image_file)], out_dir=tmp_path / "out",
                         dpi=300.0, overlay=True)
    report = run_pipeline(cfg)
    assert report.all_succeeded
    (result,) = report.results
    assert result.metrics.area_px == 45000
    assert result.metrics.area_mm2 == pytest.approx(322.58, abs=1e-9)
    assert result.component_areas == [45000]
    assert result.warnings == []
    assert (tmp_path / "out" / "report.json").exists()
    assert (tmp_path / "out" / "report.csv").exists()
    overlay_png = (tmp_path / "out" / "rect_overlay.png").read_bytes()
    overlay = decode_image(overlay_png)
    assert overlay.width == 400 and overlay.height == 250
    # foreground pixels are a 50/50 blend of black and red
    assert overlay.pixels[100, 100].tolist() == [128, 0, 0]
    assert overlay.pixels[0, 0].tolist() == [255, 255, 255]


def test_run_pipeline_is_deterministic(tmp_path, rect_image_file):
    def one_run(sub):
        cfg = PipelineConfig(inputs=[str(rect_image_file)], out_dir=tmp_path / sub, dpi=300.0)
        d = report_dict(run_pipeline(cfg))
        for image in d["images"]:
            image.pop("elapsed_s")
        return json.dumps(d, sort_keys=True)

    assert one_run("a") == one_run("b")


def test_run_pipeline_empty_inputs(tmp_path):
    report = run_pipeline(PipelineConfig(inputs=[], out_dir=tmp_path, dpi=300.0))
    assert report.results == []
    assert report.all_succeeded


def test_run_pipeline_config_errors(tmp_path):
    from leafmetric.metrics import ReferenceMeasurement

    with pytest.raises(ConfigError):
        run_pipeline(PipelineConfig(inputs=[], out_dir=tmp_path))  # no calibration
    both = PipelineConfig(inputs=[], out_dir=tmp_path, dpi=300.0,
                          reference=ReferenceMeasurement((0, 0), (300, 0), 25.4))
    with pytest.raises(ConfigError):
        run_pipeline(both)
    with pytest.raises(ConfigError):
        run_pipeline(PipelineConfig(inputs=[], out_dir=tmp_path, dpi=-1.0))


def test_run_pipeline_records_per_image_errors(tmp_path, rect_image_file):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"not an image at all")
    missing = tmp_path / "nope.png"
    cfg = PipelineConfig(inputs=[str(bad), str(missing), str(rect_image_file)],
                         out_dir=tmp_path / "out", dpi=300.0)
    report = run_pipeline(cfg)
    assert not report.all_succeeded
    by_path = {r.path: r for r in report.results}
    assert "UnsupportedFormat" in by_path[str(bad)].error
    assert by_path[str(bad)].metrics is None
    assert by_path[str(missing)].error is not None
    assert by_path[str(rect_image_file)].metrics.area_px == 45000
    # failed images keep an error record in the JSON report, never metrics
    d = report_dict(report)
    entries = {e["path"]: e for e in d["images"]}
    assert "metrics" not in entries[str(bad)]
    assert "error" in entries[str(bad)]


def test_every_input_appears_once(tmp_path):
    paths = []
    for i, shade in enumerate((0, 40, 80)):
        canvas = np.full((40, 40, 3), 255, dtype=np.uint8)
        canvas[10:30, 10:30] = shade
        p = tmp_path / f"leaf{i}.png"
        p.write_bytes(png_bytes(canvas))
        paths.append(str(p))
    cfg = PipelineConfig(inputs=paths, out_dir=tmp_path / "out", dpi=300.0, min_area=0)
    report = run_pipeline(cfg)
    assert [r.path for r in report.results] == paths
    assert all(r.metrics.area_px == 400 for r in report.results)


def test_csv_report_rounds_mm(tmp_path, rect_image_file):
    out = tmp_path / "out"
    cfg = PipelineConfig(inputs=[str(rect_image_file)], out_dir=out, dpi=300.0,
                         formats=("csv",))
    run_pipeline(cfg)
    with open(out / "report.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["area_mm2"] == "322.58"
    assert rows[0]["area_px"] == "45000"
    assert not (out / "report.json").exists()


def test_figures_written(tmp_path, rect_image_file):
    out = tmp_path / "out"
    cfg = PipelineConfig(inputs=[str(rect_image_file)], out_dir=out, dpi=300.0,
                         figures=True, formats=("json",))
    run_pipeline(cfg)
    fig = out / "rect_figure.png"
    assert fig.exists() and fig.stat().st_size > 1000


def test_hue_pipeline_route(tmp_path):
    from leafmetric.segmentation import HueRange

    canvas = np.full((60, 60, 3), 255, dtype=np.uint8)
    canvas[10:40, 10:40] = (0, 255, 0)
    p = tmp_path / "green.png"
    p.write_bytes(png_bytes(canvas))
    cfg = PipelineConfig(inputs=[str(p)], out_dir=tmp_path / "out", dpi=300.0,
                         hue=HueRange(90, 150), min_area=0)
    report = run_pipeline(cfg)
    assert report.results[0].metrics.area_px == 900


# --- command line ---


def test_cli_measure_exit_codes(tmp_path, rect_image_file, capsys):
    out = tmp_path / "out"
    code = main(["measure", "--input", str(rect_image_file), "--dpi", "300",
                 "--threshold", "128", "--bg", "white", "--out", str(out)])
    assert code == 0
    assert "322.58" in capsys.readouterr().out
    data = json.loads((out / "report.json").read_text())
    assert data["version"] == 1
    assert data["images"][0]["metrics"]["area_px"] == 45000


def test_cli_conflicting_calibration_is_config_error(tmp_path, rect_image_file):
    code = main(["measure", "--input", str(rect_image_file), "--dpi", "300",
                 "--ref", "0,0,300,0,25.4", "--out", str(tmp_path / "out")])
    assert code == 2
    assert not (tmp_path / "out" / "report.json").exists()


def test_cli_missing_calibration_is_config_error(tmp_path, rect_image_file):
    code = main(["measure", "--input", str(rect_image_file),
                 "--out", str(tmp_path / "out")])
    assert code == 2


def test_cli_failed_image_exit_code(tmp_path):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"junk")
    code = main(["measure", "--input", str(bad), "--dpi", "300",
                 "--out", str(tmp_path / "out")])
    assert code == 1


def test_cli_zero_inputs_is_success(tmp_path):
    code = main(["measure", "--input", str(tmp_path / "*.png"), "--dpi", "300",
                 "--out", str(tmp_path / "out")])
    assert code == 0


def test_cli_config_file_and_flag_override(tmp_path, rect_image_file, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "\n".join([
            f"input = {rect_image_file}",
            "threshold = 0  # guaranteed-empty foreground",
            "bg = white",
            "dpi = 300",
            f"out = {tmp_path / 'out'}",
            "format = json",
            "overlay = false",
        ])
    )
    # config alone: threshold 0 finds nothing -> EmptyMask failure
    assert main(["measure", "--config", str(cfg_file)]) == 1
    # flag wins over the file value
    assert main(["measure", "--config", str(cfg_file), "--threshold", "128"]) == 0
    out = capsys.readouterr().out
    assert "322.58" in out


def test_cli_config_file_unknown_key(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("thresold = 10\n")
    assert main(["measure", "--config", str(cfg_file)]) == 2


def test_cli_calibrate_prints_dpi(rect_image_file, capsys):
    code = main(["calibrate", "--input", str(rect_image_file),
                 "--ref", "0,0,300,400,25.4"])
    assert code == 0
    assert float(capsys.readouterr().out.strip()) == pytest.approx(500.0)


def test_cli_calibrate_degenerate_reference(rect_image_file):
    code = main(["calibrate", "--input", str(rect_image_file),
                 "--ref", "5,5,5,5,25.4"])
    assert code == 2
