#!/usr/bin/env python3
"""
Adaptive Load Balancing - Startup Script
Checks dependencies, prepares the results directory and dispatches to the CLI
"""

import sys
from pathlib import Path


def check_dependencies():
    """Check if required dependencies are installed"""
    try:
        import click  # noqa: F401
        import numpy  # noqa: F401
        import pandas  # noqa: F401
        import pydantic_settings  # noqa: F401
        import structlog  # noqa: F401
        return True
    except ImportError as e:
        print(f"❌ Missing dependency: {e}", file=sys.stderr)
        print("Please run: pip install -r requirements.txt", file=sys.stderr)
        return False


def create_directories():
    """Create the default results directory"""
    from adaptive_lb.config import settings

    Path(settings.OUTPUT_DIR).mkdir(parents=True, exist_ok=True)


def main():
    if not check_dependencies():
        sys.exit(1)

    create_directories()

    from adaptive_lb.cli import main as cli_main

    cli_main()


if __name__ == "__main__":
    main()
