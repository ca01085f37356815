"""
Summary:
CLI entrypoint so you can run:
  PYTHONPATH=src python -m dualax <command> [options]
"""

from __future__ import annotations

from dualax.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
