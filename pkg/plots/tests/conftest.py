import subprocess
import sys

import pytest


def run_sim(args, out_path):
    """Produce a log by invoking the simulator CLI, the supported interface."""
    cmd = [sys.executable, "-m", "biquadcopter"] + args + ["--out", str(out_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return str(out_path)


@pytest.fixture(scope="session")
def circle_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("logs") / "circle.csv"
    return run_sim(["circle", "--duration", "2.0"], out)


@pytest.fixture(scope="session")
def hover_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("logs") / "hover.csv"
    return run_sim(["hover", "--duration", "0.2",
                    "--hover-point", "0", "0", "0"], out)


@pytest.fixture(scope="session")
def failure_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("logs") / "failure.csv"
    return run_sim(["hover", "--duration", "0.5", "--failure", "bottom4",
                    "--failure-time", "0.2", "--hover-point", "0", "0", "0"], out)
