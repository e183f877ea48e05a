"""Allow `python -m paintrig ...` as an alias for the paintrig script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
