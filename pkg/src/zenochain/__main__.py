import sys

from zenochain.cli import main

sys.exit(main())
