#!/usr/bin/env python
"""Run ``ffjpl check|derive|eval|oracle`` or the test suite (``test ffjpl``)."""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'projectconfig.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise SystemExit('ffjpl runs on Django; install it with `pip install -r requirements.txt` '
                         'in the active environment') from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
