"""Run only the acceptance suite and print the per-criterion summary."""

import sys

import pytest

if __name__ == "__main__":
    sys.exit(pytest.main(["-q", "-m", "acceptance", "tests/test_acceptance.py", *sys.argv[1:]]))
