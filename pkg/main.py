import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from hadamard.cli import run

if __name__ == "__main__":
    sys.exit(run())
