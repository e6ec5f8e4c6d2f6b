import sys
import os

# Ensure kitaev_lab package is found
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from kitaev_lab import __version__
from kitaev_lab.cli import run


def test_sanity(capsys):
    assert run(["--version"]) == 0
    out = capsys.readouterr().out
    assert __version__ in out
    print(f"Sanity Check Passed: Version {__version__}")
