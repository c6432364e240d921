import pytest

from dwlab import kernels


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    return kernels.backend(request.param)


@pytest.fixture
def both_backends():
    return [kernels.backend(name) for name in kernels.available_backends()]
