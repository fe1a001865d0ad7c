#!/usr/bin/env python3
"""
Quick start script for cclab.

Checks the environment, then hands the command line over to the CLI:

    python run.py reproduce table1
    python run.py region --p1 3.5 --p2 6 --h12 "1@10" --h21 "1@20" --theta metric
"""

import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is 3.11 or higher."""
    if sys.version_info < (3, 11):
        print("❌ Python 3.11 or higher is required", file=sys.stderr)
        print(f"Current version: {sys.version}", file=sys.stderr)
        return False
    return True


def check_dependencies():
    """Check if required packages are installed."""
    try:
        import dotenv
        import matplotlib
        import numpy
        import pydantic
        import pydantic_settings
        import scipy
        return True
    except ImportError as e:
        print(f"❌ Missing dependency: {e}", file=sys.stderr)
        print("📦 Install dependencies: pip install -r requirements.txt", file=sys.stderr)
        return False


def check_env_file():
    """A .env file is optional; CCLAB_* variables can come from the shell."""
    if not Path(".env").exists():
        print("ℹ️  No .env file; using CCLAB_* environment variables and defaults", file=sys.stderr)
    return True


def main():
    """Main startup function."""
    checks = [
        check_python_version(),
        check_dependencies(),
        check_env_file(),
    ]

    if not all(checks):
        print("\n❌ Setup incomplete. Please fix the issues above.", file=sys.stderr)
        sys.exit(1)

    from cclab.main import main as cli_main

    try:
        sys.exit(cli_main(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n👋 Interrupted.", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
