import sys

from hardycomp.cli import main

sys.exit(main())
