import sys

from nlgames.cli import main

sys.exit(main())
