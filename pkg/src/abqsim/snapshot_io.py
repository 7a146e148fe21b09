"""Plain-text result serialization: CSV time series and field snapshots.

Snapshot format (self-describing, bit-exact round trip):

    ABQSNAP1 nx ny dx dy x0 y0 t gauge=<descriptor>
    <re> <im>          # nx*ny lines, row-major with y outermost

All floats are written with 17 significant digits.
"""

from __future__ import annotations

import dataclasses
import json
import os
from typing import Dict

import numpy as np

from .errors import ConfigurationError
from .fields import WaveField, make_grid


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_timeseries(series: Dict[str, np.ndarray], path: str):
    """CSV with first column t and one column per named observable."""
    if "t" not in series:
        raise ConfigurationError("time series must contain a 't' column")
    names = ["t"] + [k for k in series.keys() if k != "t"]
    cols = [np.asarray(series[k], dtype=float) for k in names]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ConfigurationError("all time-series columns must share the length of t")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(c[i]) for c in cols) + "\n")


def read_timeseries(path: str) -> Dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def write_snapshot(field: WaveField, gauge_descriptor: str, t: float, path: str):
    """Self-describing complex-field snapshot."""
    g = field.grid
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"ABQSNAP1 {g.nx} {g.ny} {_fmt(g.dx)} {_fmt(g.dy)} "
                 f"{_fmt(g.x0)} {_fmt(g.y0)} {_fmt(t)} gauge={gauge_descriptor}\n")
        amp = field.amp
        for j in range(g.ny):
            row = amp[j]
            fh.write("\n".join(f"{_fmt(v.real)} {_fmt(v.imag)}" for v in row))
            fh.write("\n")


def read_snapshot(path: str):
    """Returns (WaveField, gauge_descriptor, t)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 9 or header[0] != "ABQSNAP1" or not header[8].startswith("gauge="):
            raise ConfigurationError(f"{path} is not an ABQSNAP1 snapshot")
        nx, ny = int(header[1]), int(header[2])
        dx, dy, x0, y0, t = (float(v) for v in header[3:8])
        descriptor = header[8][len("gauge="):]
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (nx * ny, 2):
        raise ConfigurationError(f"snapshot body has shape {data.shape}, expected ({nx * ny}, 2)")
    amp = (data[:, 0] + 1j * data[:, 1]).reshape(ny, nx)
    grid = make_grid(nx, ny, dx, dy, x0, y0)
    return WaveField(grid, amp), descriptor, t


def report_to_json_dict(report) -> dict:
    return {
        "scenario": report.scenario,
        "parameters": report.parameters,
        "events": report.events,
        "verdicts": [dataclasses.asdict(v) for v in report.verdicts],
        "timeseries_columns": list(report.timeseries.keys()),
        "passed": report.passed(),
    }


def write_report(report, out_dir: str, echo_text: str):
    """report.json + timeseries.csv + config echo in out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config_echo.txt"), "w", encoding="utf-8") as fh:
        fh.write(echo_text)
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report_to_json_dict(report), fh, indent=2, default=str)
        fh.write("\n")
    if report.timeseries:
        write_timeseries(report.timeseries, os.path.join(out_dir, "timeseries.csv"))
