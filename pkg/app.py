# SPDX-License-Identifier: MIT-0

# !/usr/bin/env python3

import sys

from lib.cli import main


if __name__ == '__main__':
    sys.exit(main())
