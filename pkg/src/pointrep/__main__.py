import sys

from pointrep.cli import main

sys.exit(main())
