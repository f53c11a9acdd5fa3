import sys

from incgr.cli import main

sys.exit(main())
