"""
Simulator entry script
python simulate.py --config run.toml --out results/
"""

import sys

from cli.main import main

if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        sys.exit(130)
