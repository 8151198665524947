import sys

from slopelab.cli import main

sys.exit(main())
