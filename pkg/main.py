# Ensure project root is on path when running as script
import os, sys
sys.path.append(os.path.dirname(__file__))

from controllers.cli import main

if __name__ == "__main__":
    sys.exit(main())
