"""Run the acceptance suite and print one PASS/FAIL line per criterion.

Run with:
    python3 scripts/run_acceptance.py
"""
import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    root = Path(__file__).resolve().parents[1]
    sys.exit(pytest.main(["-q", str(root / "tests" / "test_acceptance.py"), "--rootdir", str(root)]))
