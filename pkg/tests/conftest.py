"""
Pytest configuration and fixtures
"""

import pytest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.lattice import make_params


@pytest.fixture
def desk_params():
    """Desk-scale grid-stabilized parameters (M=5, b=1/21, L=5)."""
    return make_params(M=5, b="1/21", L=5, lambda_del=1.0, rho=1.0, variant="DEL_GRID")


@pytest.fixture
def tiny_params():
    """Smallest useful lattice (M=1, b=1/5, L=1); every block is cheap to simulate."""
    return make_params(M=1, b="1/5", L=1, lambda_del=1.0, rho=1.0, variant="DEL_GRID")


@pytest.fixture
def dense_params():
    """Tiny lattice with a doubled driver ceiling; crossings of index 6 are undecided near lambda=0.05."""
    return make_params(M=1, b="1/5", L=1, lambda_del=1.0, rho=2.0, variant="DEL_GRID")


@pytest.fixture
def sparse_del_params():
    """Pure Delaunay streets on the tiny lattice with about one seed per five blocks."""
    return make_params(M=1, b="1/5", L=1, lambda_del=0.2, rho=1.0, variant="DEL")


@pytest.fixture
def capped_params():
    return make_params(M=5, b="1/21", L=5, lambda_del=1.0, rho=1.0, variant="CAPPED")


@pytest.fixture
def width_params():
    return make_params(M=5, b="1/21", L=5, lambda_del=1.0, w0=0.5, eta=0.01, variant="WIDTH")


@pytest.fixture
def del_params():
    """Pure Delaunay streets without the grid."""
    return make_params(M=5, b="1/21", L=5, lambda_del=1.0, rho=1.0, variant="DEL")


@pytest.fixture
def temp_config_dir(tmp_path):
    """Create temporary config directory."""
    config_dir = tmp_path / "config"
    config_dir.mkdir()

    # Create sample config.yaml
    config_file = config_dir / "config.yaml"
    config_file.write_text(f"""
model:
  d: 2
  M: 1.0
  b: "1/5"
  lambda: 0.0
  lambda_del: 1.0
  L: 1.0
  rho: 1.0
  variant: "DEL_GRID"

run:
  n: 6
  trials: 4
  seed: 7
  threads: 1

simulation:
  progress_every: 1000

output:
  dir: "{(tmp_path / 'results').as_posix()}"

logging:
  level: "WARNING"
""")

    presets_file = config_dir / "presets.yaml"
    presets_file.write_text("""
presets:
  small:
    trials: 3
    n: 5
""")

    return config_dir


@pytest.fixture
def temp_output_dir(tmp_path):
    """Create temporary output directory."""
    out = tmp_path / "results"
    out.mkdir()
    return out


# Skip markers
def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line(
        "markers", "integration: mark test as integration test (runs whole commands)"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow running"
    )
