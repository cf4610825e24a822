"""Command-line entrypoint for the duplication pipeline."""

from duplication.cli import main


raise SystemExit(main())
