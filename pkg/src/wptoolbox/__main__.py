"""Allow ``python -m wptoolbox ...`` to reach the command-line interface."""
import sys

from .cli import main

sys.exit(main())
