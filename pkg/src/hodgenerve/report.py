"""Plain JSON/CSV/text writers.

Everything except ``metadata.json`` is byte-deterministic: keys are sorted,
floats go through ``repr`` and no timestamps are written.
"""
from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cochains import CoboundaryMatrix
from .nerve import Nerve, NerveStats
from .spectra import SpectrumReport


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _clean(obj):
    """JSON has no inf/nan; write them as strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    obj = json.loads(json.dumps(obj, default=_default))
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_csv_text(header, rows))
    return path


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def nerve_json(nerve: Nerve, stats: NerveStats) -> dict:
    return {
        "epsilon": nerve.epsilon,
        "centers": [list(map(float, c.coords)) for c in nerve.centers],
        "S": {str(q): [list(s) for s in nerve.S(q)] for q in range(nerve.qmax + 1)},
        "nu": stats.nu,
        "counts": list(stats.counts),
    }


def nerve_csv_rows(nerve: Nerve):
    for q in range(nerve.qmax + 1):
        for s, r in zip(nerve.S(q), nerve.witness_radii[q]):
            yield q, " ".join(map(str, s)), float(r)


NERVE_CSV_HEADER = ("q", "tuple", "witness_radius")


def matrix_text(mat: CoboundaryMatrix) -> str:
    """Coordinate format: ``q nrows ncols`` then ``row col value`` per entry."""
    coo = mat.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{mat.degree} {mat.shape[0]} {mat.shape[1]}"]
    lines += [f"{coo.row[k]} {coo.col[k]} {coo.data[k]}" for k in order]
    return "\n".join(lines) + "\n"


def spectrum_csv_rows(report: SpectrumReport):
    for k, lam in enumerate(report.eigenvalues):
        yield k, float(lam), int(k < report.betti)


SPECTRUM_CSV_HEADER = ("k", "lambda", "is_zero")
COUNTEREXAMPLE_CSV_HEADER = ("m", "ratio_num", "ratio_den")
STUDY_CSV_HEADER = ("check_name", "N", "residual", "observed_order")
COMPARISON_CSV_HEADER = ("epsilon", "k", "lambda_X", "lambda_M", "ratio", "harmonic_flag")


def gnuplot_script(comparison_csv: str, band_png: str = "band.png") -> str:
    """Script plotting lambda_M / lambda_X against k, one curve per epsilon."""
    return "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        f"set output '{band_png}'",
        "set xlabel 'k'",
        "set ylabel 'lambda_M / lambda_X'",
        "set logscale y",
        f"eps = system(\"awk -F, 'NR>1 && $6==0 {{print $1}}' {comparison_csv} | sort -u\")",
        f"plot for [e in eps] '{comparison_csv}' using "
        "(($1==e+0 && $6==0) ? $2 : NaN):5 with linespoints title 'eps='.e",
        "",
    ])


def write_metadata(out_dir, command: str, extra: dict | None = None) -> Path:
    from . import __version__
    meta = {
        "command": command,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if extra:
        meta.update(extra)
    return write_json(Path(out_dir) / "metadata.json", meta)
