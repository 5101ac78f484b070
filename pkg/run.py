#!/usr/bin/env python3
"""
run.py - Start the lattice network coding command line
"""

import os
import sys
from pathlib import Path

# Configuration
PROJECT_ROOT = Path(__file__).parent.resolve()

# Critical: Add project root to sys.path so 'app.config' imports work
sys.path.insert(0, str(PROJECT_ROOT))
os.environ.setdefault("PYTHONUNBUFFERED", "1")

from app.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
