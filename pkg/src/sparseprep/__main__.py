import sys

from sparseprep.cli import main

sys.exit(main())
