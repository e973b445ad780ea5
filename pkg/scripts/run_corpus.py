#!/usr/bin/env python3
"""Run the shipped verification corpus and print a summary.

Usage: python scripts/run_corpus.py [--format text|structured] [--seed N]
"""

import sys
from pathlib import Path

from jetsym.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "src" / "jetsym" / "corpus"
NAMES = ["example1", "example2", "example3", "example4", "mc_pairs",
         "combination_defects"]

if __name__ == "__main__":
    files = [str(CORPUS / f"{name}.prob") for name in NAMES]
    sys.exit(main(files + sys.argv[1:]))
