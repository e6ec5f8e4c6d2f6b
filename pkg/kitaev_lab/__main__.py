import sys

from kitaev_lab.cli import run

if __name__ == "__main__":
    sys.exit(run())
