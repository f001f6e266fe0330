import sys

from ntype_eit.cli import main

sys.exit(main())
