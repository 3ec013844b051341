import sys

from uncertainty_lab.cli import main

sys.exit(main())
