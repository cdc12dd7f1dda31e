import pytest

import vertegrow


@pytest.fixture(scope="session", autouse=True)
def compiled_kernel():
    """Compile the sweep kernel once so timing tests measure runs, not JIT."""
    vertegrow.warm_up()
