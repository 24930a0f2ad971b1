#!/usr/bin/env python3
"""
flowmut - Main launcher
Loads .env, puts the flowmut package directory on sys.path and runs the CLI
"""
import sys
from pathlib import Path

# Load environment variables from .env file if available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

# Add flowmut to Python path
flowmut_dir = Path(__file__).resolve().parent / "flowmut"
if not flowmut_dir.exists():
    sys.stderr.write(f"flowmut directory not found: {flowmut_dir}\n")
    sys.exit(2)
sys.path.insert(0, str(flowmut_dir))

from cli import main  # noqa: E402

if __name__ == "__main__":
    main()
