import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vidsal import kernels  # noqa: E402

WORKED_SIM = np.array([[1.0, 0.9, 0.1], [0.9, 1.0, 0.1], [0.1, 0.1, 1.0]])

BACKENDS = ["python"]
try:
    kernels.get_backend("cython")
    BACKENDS.append("cython")
except ImportError:
    pass


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def worked_sim():
    return WORKED_SIM.copy()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def blob_video(tmp_path_factory):
    from vidsal.synthetic import write_blob_video
    return write_blob_video(tmp_path_factory.mktemp("blob"))
