import json
import os
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

# criterion number -> (status, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def frozen():
    return json.loads((HERE / "data" / "frozen.json").read_text())


def pytest_collection_modifyitems(config, items):
    if os.environ.get("UNITARYLAB_EXTENDED"):
        return
    skip = pytest.mark.skip(reason="extended run; set UNITARYLAB_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[k]
        tr.write_line(f"criterion {k:2d}: {status:4s}  {detail}")
