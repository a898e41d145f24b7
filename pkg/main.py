# external imports
import sys

# internal imports
from modules.cli import main

# Main entry point
if __name__ == "__main__":
    sys.exit(main())
