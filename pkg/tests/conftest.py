import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

# (criterion number, description, "PASS"/"FAIL", elapsed seconds), filled by
# the acceptance suite and printed in the terminal summary.
ACCEPTANCE_RESULTS: list[tuple[int, str, str, float]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number, description, status, elapsed in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(
            f"criterion {number:2d} [{status}] {description} ({elapsed:.2f}s)"
        )

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def base_config_payload(tmp_path):
    return {
        "datasets": ["naturalquestions"],
        "sample_size": 5,
        "seed": 7,
        "output_dir": str(tmp_path / "runs"),
    }


@pytest.fixture
def make_config(tmp_path):
    from ragebench.config import validate_config

    def build(**overrides):
        payload = {
            "datasets": ["naturalquestions"],
            "sample_size": 5,
            "seed": 7,
            "output_dir": str(tmp_path / "runs"),
        }
        payload.update(overrides)
        return validate_config(json.dumps(payload))

    return build
