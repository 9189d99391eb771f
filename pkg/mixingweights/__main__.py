import sys

from mixingweights.cli import main

sys.exit(main())
