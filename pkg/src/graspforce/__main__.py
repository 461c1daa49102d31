"""Allow `python -m graspforce`."""

import sys

from .cli import main

sys.exit(main())
