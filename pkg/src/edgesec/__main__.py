import sys

from edgesec.cli import main

sys.exit(main())
