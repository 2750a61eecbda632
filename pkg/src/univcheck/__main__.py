import sys

from univcheck.cli import main

sys.exit(main())
