import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "quantile_system.settings")
django.setup()

# Mirror `manage.py test`: the Django test runner sets up the test
# environment (e.g. allows the 'testserver' host) before running tests.
from django.test.utils import setup_test_environment  # noqa: E402

setup_test_environment()
