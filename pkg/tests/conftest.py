import numpy as np
import pytest

from framestats import kernels


def pytest_addoption(parser):
    parser.addoption(
        "--kernel-backend",
        default="auto",
        choices=["auto", "python", "compiled"],
        help="kernel backend the suite runs against",
    )


def pytest_configure(config):
    kernels.set_backend(config.getoption("--kernel-backend"))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def unit_rows(rng, n, d):
    """Random unit vectors, rejection-free (Gaussian normalization)."""
    pts = rng.normal(size=(n, d))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def random_rotation(rng, d):
    """Haar-ish random orthogonal matrix via QR."""
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diag(r))
