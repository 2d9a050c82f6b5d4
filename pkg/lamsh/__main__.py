import sys

from lamsh.main import main

sys.exit(main())
