import numpy as np
import pytest

from biquadplots import FIGURE_KINDS, FigureSpec, PlotError, load_log, plot, render
from biquadplots.figures import _limits

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def spec_for(kind, csv_path, tmp_path, fmt=None):
    suffix = fmt or "png"
    out = tmp_path / f"{kind}.{suffix}"
    return FigureSpec(kind=kind, input_csv=str(csv_path), output_path=str(out), fmt=fmt)


@pytest.mark.parametrize("kind", FIGURE_KINDS)
def test_all_kinds_render_png(kind, circle_csv, tmp_path):
    spec = spec_for(kind, circle_csv, tmp_path)
    path = plot(spec)
    data = open(path, "rb").read()
    assert len(data) > 0
    assert data[:8] == PNG_MAGIC


@pytest.mark.parametrize("kind", FIGURE_KINDS)
def test_all_kinds_render_failure_log(kind, failure_csv, tmp_path):
    # Logs with a mid-run rotor loss still render: zeros and jumps are data.
    spec = spec_for(kind, failure_csv, tmp_path)
    path = plot(spec)
    assert open(path, "rb").read()[:8] == PNG_MAGIC


def test_svg_output(circle_csv, tmp_path):
    out = tmp_path / "fig.svg"
    spec = FigureSpec(kind="traj-topview", input_csv=str(circle_csv),
                      output_path=str(out))
    assert spec.resolved_format == "svg"
    plot(spec)
    text = out.read_text()
    assert "<svg" in text


def test_format_overrides_suffix(circle_csv, tmp_path):
    out = tmp_path / "fig.dat"
    spec = FigureSpec(kind="traj-topview", input_csv=str(circle_csv),
                      output_path=str(out), fmt="svg")
    plot(spec)
    assert "<svg" in out.read_text()


def test_unknown_kind_rejected(circle_csv, tmp_path):
    with pytest.raises(PlotError, match="kind"):
        FigureSpec(kind="sideview", input_csv=str(circle_csv),
                   output_path=str(tmp_path / "x.png"))


def test_unknown_format_rejected(circle_csv, tmp_path):
    with pytest.raises(PlotError, match="format"):
        FigureSpec(kind="traj3d", input_csv=str(circle_csv),
                   output_path=str(tmp_path / "x.pdf"))


def test_hover_actuator_lines_are_flat(hover_csv, tmp_path):
    # In steady hover every rotor holds the same thrust, so the actuator
    # time series should be four horizontal lines at mg/4.
    spec = spec_for("timeseries-actuators", hover_csv, tmp_path)
    fig = render(spec)
    try:
        thrust_ax = fig.axes[0]
        lines = thrust_ax.get_lines()
        assert len(lines) == 4
        for line in lines:
            ydata = np.asarray(line.get_ydata(), dtype=float)
            assert ydata.size > 0
            np.testing.assert_allclose(ydata, 12.25, atol=1e-6)
    finally:
        import matplotlib.pyplot as plt

        plt.close(fig)


def test_missing_column_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,px,py\n0.0,1.0,2.0\n")
    spec = FigureSpec(kind="traj-topview", input_csv=str(bad),
                      output_path=str(tmp_path / "x.png"))
    with pytest.raises(PlotError) as excinfo:
        plot(spec)
    assert "pdx" in str(excinfo.value)


def test_header_only_csv_rejected(tmp_path, circle_csv):
    header = open(circle_csv).readline()
    empty = tmp_path / "empty.csv"
    empty.write_text(header)
    spec = FigureSpec(kind="traj-topview", input_csv=str(empty),
                      output_path=str(tmp_path / "x.png"))
    with pytest.raises(PlotError, match="no data rows"):
        plot(spec)


def test_missing_file_named(tmp_path):
    missing = tmp_path / "nope.csv"
    spec = FigureSpec(kind="traj3d", input_csv=str(missing),
                      output_path=str(tmp_path / "x.png"))
    with pytest.raises(PlotError, match="nope.csv"):
        plot(spec)


def test_load_log_returns_float_arrays(circle_csv):
    data = load_log(circle_csv, required=("t", "px", "f1"))
    assert set(("t", "px", "f1")) <= set(data)
    assert data["t"].dtype == np.float64
    assert data["t"].shape == data["px"].shape


def test_limits_deterministic_and_padded():
    lo, hi = _limits(np.array([0.0, 1.0]), np.array([0.5, 2.0]))
    assert lo < 0.0 and hi > 2.0
    assert (lo, hi) == _limits(np.array([0.0, 1.0]), np.array([0.5, 2.0]))


def test_limits_degenerate_span():
    lo, hi = _limits(np.array([3.0, 3.0]))
    assert hi - lo >= 1.0


def test_axis_ranges_repeatable(circle_csv, tmp_path):
    import matplotlib.pyplot as plt

    spec = spec_for("traj-topview", circle_csv, tmp_path)
    ranges = []
    for _ in range(2):
        fig = render(spec)
        ax = fig.axes[0]
        ranges.append((ax.get_xlim(), ax.get_ylim()))
        plt.close(fig)
    assert ranges[0] == ranges[1]


def test_render_leaves_no_open_figures(circle_csv, tmp_path):
    import matplotlib.pyplot as plt

    plt.close("all")
    spec = spec_for("timeseries-position", circle_csv, tmp_path)
    plot(spec)
    assert plt.get_fignums() == []
