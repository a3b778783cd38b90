import sys

from gtm.cli import main

sys.exit(main())
