"""Run artifacts: trajectory and field CSV files, SVG plots and the JSON manifest.

Every file is written to a temporary sibling first and then renamed into
place, so readers never see a partial file.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .engine import LOG_COLUMNS, SimConfig, SimLog, trapezoid_steps
from .errors import IoError

FLOAT_FMT = "{:.17g}"


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


def atomic_write(path: str | Path, data: str | bytes) -> Path:
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": "", "encoding": "utf-8"})) as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_trajectory_csv(log: SimLog, path: str | Path) -> Path:
    if len(log) == 0:
        raise IoError("log is empty; nothing to write")
    cols = [log[c] for c in LOG_COLUMNS]
    rows = ([_fmt(c[i]) for c in cols] for i in range(len(log)))
    return atomic_write(path, _csv_text(LOG_COLUMNS, rows))


def read_trajectory_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, j] for j, name in enumerate(header)}


def snapshot_filename(t: float) -> str:
    return f"fields_t{t:g}.csv"


def write_fields_csv(log: SimLog, out_dir: str | Path) -> list[Path]:
    """One CSV per snapshot with columns ``z,w,p,w_hat,p_hat`` (or ``q`` in place of ``w``)."""
    if len(log) == 0:
        raise IoError("log is empty; nothing to write")
    out_dir = Path(out_dir)
    paths = []
    for t, snap in sorted(log.snapshots.items()):
        header = list(snap)
        rows = zip(*([_fmt(v) for v in snap[h]] for h in header))
        paths.append(atomic_write(out_dir / snapshot_filename(t), _csv_text(header, rows)))
    return paths


def render_svg(log: SimLog, path: str | Path) -> Path:
    """Tip deflection of plant and observer, and the energy traces, as one SVG."""
    if len(log) == 0:
        raise IoError("log is empty; nothing to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = log["t"]
    with matplotlib.rc_context({"svg.hashsalt": "phstring", "svg.fonttype": "none"}):
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
        ax1.plot(t, log["w_L"], label="w(L)")
        ax1.plot(t, log["what_L"], "--", label="w_hat(L)")
        ax1.set_ylabel("tip deflection")
        ax1.legend()
        ax1.grid(alpha=0.3)
        for name in ("H", "Hcl", "Htilde"):
            ax2.plot(t, log[name], label=name)
        ax2.set_xlabel("t")
        ax2.set_ylabel("energy")
        ax2.legend()
        ax2.grid(alpha=0.3)
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return atomic_write(path, buf.getvalue())


def plant_balance_residual(t: np.ndarray, H: np.ndarray, u: np.ndarray, ybar: np.ndarray) -> float:
    """Max per-step ``|dH - trapezoid(u ybar)|`` relative to max ``|H|``; computable from the CSV."""
    dt = float(t[1] - t[0]) if len(t) > 1 else 0.0
    res = np.diff(H) - trapezoid_steps(u * ybar, dt)
    peak = float(np.max(np.abs(H)))
    worst = float(np.max(np.abs(res), initial=0.0))
    return worst / peak if peak > 0 else worst


def trajectory_summary(cols: dict[str, np.ndarray]) -> dict[str, float]:
    return {
        "final_w_L": float(cols["w_L"][-1]),
        "final_Htilde": float(cols["Htilde"][-1]),
        "max_casimir_drift": float(np.max(np.abs(cols["casimir"] - cols["casimir"][0]))),
        "max_balance_residual": plant_balance_residual(cols["t"], cols["H"], cols["u"], cols["ybar"]),
    }


@dataclass
class RunManifest:
    config: dict
    files: list[str]
    summary: dict[str, float | None]
    version: str = __version__
    reports: dict = field(default_factory=dict)

    @classmethod
    def build(cls, config: SimConfig, log: SimLog, files, equivalence=None, reports=None):
        summary = trajectory_summary(log.columns)
        summary["max_equivalence_deviation"] = None if equivalence is None else equivalence.u_exact
        reports = dict(reports or {})
        if log.balance is not None:
            reports.setdefault("balance", log.balance.as_dict())
        if equivalence is not None:
            reports.setdefault("equivalence", equivalence.as_dict())
        return cls(config.to_dict(), [str(f) for f in files], summary, reports=reports)

    def write(self, path: str | Path) -> Path:
        missing = [f for f in self.files if not (Path(path).parent / f).exists()]
        if missing:
            raise IoError(f"manifest lists missing files: {missing}")
        text = json.dumps(asdict(self), indent=2, sort_keys=True, default=float) + "\n"
        return atomic_write(path, text)
