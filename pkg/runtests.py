#!/usr/bin/env python
import os
import sys

import django
from django.conf import settings
from django.test.utils import get_runner


def run_tests(labels):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'test_settings')
    django.setup()
    runner = get_runner(settings)(verbosity=2)
    return runner.run_tests(labels or ['assocmem.tests'])


if __name__ == '__main__':
    sys.exit(bool(run_tests(sys.argv[1:])))
