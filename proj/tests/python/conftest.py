import json
import os
import shutil

import pytest


@pytest.fixture
def cli():
    path = os.environ.get("FKSUSC_CLI") or shutil.which("fksusc")
    if not path:
        pytest.skip("fksusc executable not available")
    return path


@pytest.fixture
def write_config(tmp_path):
    def write(doc, name="config.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return p

    return write
