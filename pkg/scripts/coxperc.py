"""
Command-line entry point.

Usage:
    python scripts/coxperc.py theta --lambda 0.3 --n 10 --trials 200
    python scripts/coxperc.py verify OSSS --config runs/osss.yaml --threads 4
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.main import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
