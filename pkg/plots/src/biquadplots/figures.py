"""Render figures from simulation CSV logs.

The only contract with the simulator is its CSV file: a header naming the
columns, one row per control cycle, angles in radians. Five figure kinds are
supported; all overlay the reference on the actual trajectory where one
exists, plot angles in degrees, and compute their axis limits from the data
with a fixed padding rule, so the same input always yields the same ranges.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGURE_KINDS = ("traj3d", "traj-topview", "timeseries-position",
                "timeseries-attitude", "timeseries-actuators")

# columns each figure kind needs (subset of the simulator's CSV header)
_REQUIRED = {
    "traj3d": ("px", "py", "pz", "pdx", "pdy", "pdz"),
    "traj-topview": ("px", "py", "pdx", "pdy"),
    "timeseries-position": ("t", "px", "py", "pz", "pdx", "pdy", "pdz"),
    "timeseries-attitude": ("t", "roll", "pitch", "yaw"),
    "timeseries-actuators": ("t", "f1", "f2", "f3", "f4", "beta1", "beta2"),
}


class PlotError(ValueError):
    """The log cannot be plotted: bad file, missing column, or no rows."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str
    output_path: str
    fmt: str | None = None  # png or svg; None derives from output_path

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; "
                            f"expected one of {', '.join(FIGURE_KINDS)}")
        fmt = self.resolved_format
        if fmt not in ("png", "svg"):
            raise PlotError(f"unsupported image format {fmt!r} (png or svg)")

    @property
    def resolved_format(self) -> str:
        if self.fmt:
            return self.fmt.lower()
        ext = os.path.splitext(self.output_path)[1].lstrip(".").lower()
        return ext or "png"


def load_log(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Read the named columns from a simulator CSV, validating as it goes."""
    try:
        with open(path) as fh:
            header = fh.readline().strip()
    except OSError as exc:
        raise PlotError(f"cannot read log {path!r}: {exc}") from exc
    columns = header.split(",")
    missing = [name for name in required if name not in columns]
    if missing:
        raise PlotError(f"log {path!r} is missing column(s) "
                        f"{', '.join(missing)} (header: {header[:80]})")
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.size == 0:
        raise PlotError(f"log {path!r} has no data rows")
    data = np.atleast_1d(data)
    return {name: np.asarray(data[name], dtype=float) for name in required}


def _limits(*series, pad_fraction=0.05, min_span=1.0):
    """Deterministic axis limits: data extent plus fixed padding."""
    lo = min(float(np.min(s)) for s in series)
    hi = max(float(np.max(s)) for s in series)
    span = hi - lo
    if span < min_span:
        center = 0.5 * (hi + lo)
        lo, hi = center - min_span / 2, center + min_span / 2
        span = min_span
    pad = pad_fraction * span
    return lo - pad, hi + pad


def _plot_traj3d(data, fig):
    ax = fig.add_subplot(projection="3d")
    ax.plot(data["pdx"], data["pdy"], data["pdz"], "k--", label="reference")
    ax.plot(data["px"], data["py"], data["pz"], label="actual")
    ax.set_xlim(_limits(data["px"], data["pdx"]))
    ax.set_ylim(_limits(data["py"], data["pdy"]))
    ax.set_zlim(_limits(data["pz"], data["pdz"]))
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    ax.set_title("trajectory, isometric view")
    ax.legend(loc="upper left")


def _plot_topview(data, fig):
    ax = fig.add_subplot()
    ax.plot(data["pdx"], data["pdy"], "k--", label="reference")
    ax.plot(data["px"], data["py"], label="actual")
    ax.set_xlim(_limits(data["px"], data["pdx"]))
    ax.set_ylim(_limits(data["py"], data["pdy"]))
    ax.set_aspect("equal", adjustable="box")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("trajectory, top view")
    ax.grid(True, alpha=0.4)
    ax.legend(loc="upper right")


def _plot_position(data, fig):
    axes = fig.subplots(3, 1, sharex=True)
    for ax, axis in zip(axes, "xyz"):
        ax.plot(data["t"], data[f"pd{axis}"], "k--", label="reference")
        ax.plot(data["t"], data[f"p{axis}"], label="actual")
        ax.set_ylabel(f"{axis} [m]")
        ax.set_ylim(_limits(data[f"p{axis}"], data[f"pd{axis}"]))
        ax.grid(True, alpha=0.4)
    axes[0].set_title("position vs reference")
    axes[0].legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    axes[-1].set_xlim(_limits(data["t"], pad_fraction=0.0, min_span=1e-6))


def _plot_attitude(data, fig):
    ax = fig.add_subplot()
    series = []
    for name in ("roll", "pitch", "yaw"):
        deg = np.degrees(data[name])
        series.append(deg)
        ax.plot(data["t"], deg, label=name)
    ax.set_xlim(_limits(data["t"], pad_fraction=0.0, min_span=1e-6))
    ax.set_ylim(_limits(*series, min_span=2.0))
    ax.set_xlabel("t [s]")
    ax.set_ylabel("angle [deg]")
    ax.set_title("attitude (ZYX Euler angles)")
    ax.grid(True, alpha=0.4)
    ax.legend(loc="upper right")


def _plot_actuators(data, fig):
    ax_f, ax_b = fig.subplots(2, 1, sharex=True)
    for name in ("f1", "f2", "f3", "f4"):
        ax_f.plot(data["t"], data[name], label=name)
    ax_f.set_ylabel("thrust [N]")
    ax_f.set_ylim(_limits(*(data[n] for n in ("f1", "f2", "f3", "f4"))))
    ax_f.set_title("actuator commands")
    ax_f.grid(True, alpha=0.4)
    ax_f.legend(loc="upper right", ncols=4)

    tilts = [np.degrees(data["beta1"]), np.degrees(data["beta2"])]
    for series, name in zip(tilts, ("beta1", "beta2")):
        ax_b.plot(data["t"], series, label=name)
    ax_b.set_ylabel("tilt [deg]")
    ax_b.set_ylim(_limits(*tilts, min_span=2.0))
    ax_b.set_xlabel("t [s]")
    ax_b.set_xlim(_limits(data["t"], pad_fraction=0.0, min_span=1e-6))
    ax_b.grid(True, alpha=0.4)
    ax_b.legend(loc="upper right", ncols=2)


_RENDERERS = {
    "traj3d": _plot_traj3d,
    "traj-topview": _plot_topview,
    "timeseries-position": _plot_position,
    "timeseries-attitude": _plot_attitude,
    "timeseries-actuators": _plot_actuators,
}


def render(spec: FigureSpec):
    """Build the figure in memory (callers who only want the file use plot)."""
    data = load_log(spec.input_csv, _REQUIRED[spec.kind])
    fig = plt.figure(figsize=(8, 6))
    try:
        _RENDERERS[spec.kind](data, fig)
    except Exception:
        plt.close(fig)
        raise
    return fig


def plot(spec: FigureSpec) -> str:
    """Render the figure and write it to spec.output_path; returns the path."""
    fig = render(spec)
    try:
        out_dir = os.path.dirname(os.path.abspath(spec.output_path))
        os.makedirs(out_dir, exist_ok=True)
        fig.savefig(spec.output_path, format=spec.resolved_format, dpi=120)
    finally:
        plt.close(fig)
    return spec.output_path
