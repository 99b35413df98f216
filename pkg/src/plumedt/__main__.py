import sys

from plumedt.cli import main

sys.exit(main())
