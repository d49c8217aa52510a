#!/usr/bin/env python
"""Command-line entry point: python manage.py <qtilde|multiplicity|ops|reconstruct|bench_mse|verify> ..."""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "backend.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the packages in requirements.txt "
            "into the active environment first."
        ) from exc
    # CommandError.returncode becomes the process exit status
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
