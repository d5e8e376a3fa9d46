import os

import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: long-running acceptance criteria (desk-scaled)")
    config.addinivalue_line(
        "markers", "fullscale: published-scale runs, hours to days; set GROWCELL_FULL=1")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GROWCELL_FULL"):
        return
    skip_full = pytest.mark.skip(reason="published-scale run; set GROWCELL_FULL=1 to enable")
    for item in items:
        if "fullscale" in item.keywords:
            item.add_marker(skip_full)
