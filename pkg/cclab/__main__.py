"""Allow `python -m cclab`."""

import sys

from .main import main

sys.exit(main())
