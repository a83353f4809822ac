import sys

from accessaudit.cli import main

sys.exit(main())
