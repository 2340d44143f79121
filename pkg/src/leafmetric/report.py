"""Report serialization: JSON at full precision, CSV rounded for spreadsheets."""

from __future__ import annotations

import csv
import json
from pathlib import Path

CSV_COLUMNS = [
    "path",
    "area_px",
    "length_px",
    "mean_width_px",
    "area_mm2",
    "length_mm",
    "width_mm",
    "component_count",
    "skeleton_branch_points",
    "warnings",
    "error",
]


def report_dict(report) -> dict:
    images = []
    for r in report.results:
        entry = {"path": r.path, "warnings": list(r.warnings), "elapsed_s": r.elapsed_s}
        if r.error is not None:
            entry["error"] = r.error
        else:
            entry["metrics"] = r.metrics.as_dict()
            entry["component_areas"] = list(r.component_areas)
        images.append(entry)
    return {"version": report.version, "config": report.config, "images": images}


def write_json(report, path: Path) -> None:
    path.write_text(json.dumps(report_dict(report), indent=2) + "\n")


def write_csv(report, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in report.results:
            if r.error is not None:
                writer.writerow([r.path, "", "", "", "", "", "", "", "", "", r.error])
                continue
            m = r.metrics
            writer.writerow([
                r.path,
                m.area_px,
                m.length_px,
                m.mean_width_px,
                f"{m.area_mm2:.2f}",
                f"{m.length_mm:.2f}",
                f"{m.width_mm:.2f}",
                m.component_count,
                m.skeleton_branch_points,
                "; ".join(r.warnings),
                "",
            ])
