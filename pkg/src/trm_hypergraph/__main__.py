"""Allow ``python -m trm_hypergraph``."""
import sys

from .cli import main

sys.exit(main())
