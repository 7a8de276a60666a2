#!/usr/bin/env python3
"""Compare the compiled and numpy backends on the hot kernel path.

Equivalent to `weylconv bench`; kept as a standalone script so the numbers
are easy to regenerate without installing the console entry point.
"""

import sys

from weylconv.cli import main

if __name__ == "__main__":
    sys.exit(main(["bench"] + sys.argv[1:]))
