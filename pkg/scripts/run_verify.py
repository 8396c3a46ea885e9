#!/usr/bin/env python3
"""Run the identity verification suites from a source checkout.

Equivalent to the installed `extensorfields-verify` entry point; see
`--help` for the flag set.
"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from extensorfields.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
