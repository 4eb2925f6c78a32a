"""Run the command line interface with ``python -m tetragon``."""

import sys

from .cli import main

sys.exit(main())
