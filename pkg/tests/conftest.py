import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pearcey_wkb.wkb_series import build_series


@pytest.fixture(scope="session")
def series8():
    return build_series(8)
