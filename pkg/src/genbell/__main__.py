import sys

from genbell.cli import main

sys.exit(main())
