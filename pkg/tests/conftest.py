import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add the package directory to the path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

# Set test environment variables before importing the package
os.environ['WL1_ENV'] = 'testing'
os.environ['LOG_JSON'] = 'false'
os.environ['LOG_LEVEL'] = 'WARNING'
os.environ['LOG_DIR'] = os.path.join(tempfile.gettempdir(), 'wl1-test-logs')
os.environ['WL1_OUTPUT_DIR'] = os.path.join(tempfile.gettempdir(), 'wl1-test-results')
os.environ.pop('WL1_WORKERS', None)
os.environ.pop('WL1_RIC_BUDGET', None)
for _name in ('WL1_FEAS_TOL', 'WL1_OPT_TOL', 'WL1_MAX_ITERS'):
    os.environ.pop(_name, None)

# Configure logging
logging.basicConfig(level=logging.CRITICAL)


@pytest.fixture
def app():
    """Create and configure a test Flask application"""
    from wl1 import create_app

    app = create_app('testing')
    app.config['TESTING'] = True
    app.start_time = 1234567890

    yield app


# pytest-flask builds its client and config fixtures from app.


@pytest.fixture
def runner(app):
    """A test runner for the app's Click commands"""
    return app.test_cli_runner()


@pytest.fixture
def rng():
    """Seeded generator for test data"""
    return np.random.default_rng(20240229)


@pytest.fixture
def tiny_config(tmp_path):
    """Bound-check sized experiment writing into a temporary directory"""
    from wl1.experiments.config import ExperimentConfig

    return ExperimentConfig(
        n=8, N=12, k=2,
        omegas=(0.0, 0.5, 1.0),
        alphas=(0.5, 1.0),
        trials=2,
        seed=7,
        output_dir=str(tmp_path),
        name='tiny',
    )


@pytest.fixture
def orthonormal_matrix(rng):
    """6 x 4 matrix with orthonormal columns"""
    q, _ = np.linalg.qr(rng.standard_normal((6, 4)))
    return q
