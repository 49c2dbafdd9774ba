#!/usr/bin/env python3
"""
🌙 sparse-pinning Runner
Independent runner for the command line

Usage:
    python run.py gen-env --kind block --n 900 --profile 0.8,0,0.8 --seed 7
    python run.py verify --suite dp-oracle
"""

import sys
from pathlib import Path

# Add current directory to path for independent operation
current_dir = str(Path(__file__).parent)
if current_dir not in sys.path:
    sys.path.insert(0, current_dir)

if __name__ == "__main__":
    from cli import main
    sys.exit(main())
