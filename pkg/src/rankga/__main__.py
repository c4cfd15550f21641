import sys

from rankga.cli import main

sys.exit(main())
