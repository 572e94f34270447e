#!/usr/bin/env python3
"""Run the complete verification harness (appendix certificates plus the
theorem inequality checks) and write the JSON/CSV reports."""

import sys

from gapforge.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "--suite", "all", "--out", "verify_report.json"]))
