"""Entry point for running the qosrate package as a module.

This allows the package to be executed with: python -m src
"""

import sys

from .main import main

if __name__ == "__main__":
    sys.exit(main())
