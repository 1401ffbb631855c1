#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""python -m subordinatorDensity"""

import sys

from .cli.main import main

if __name__ == "__main__":
    sys.exit(main())
