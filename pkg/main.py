"""
Main Entry Point for the Hassett Divisor Toolkit
"""
import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
