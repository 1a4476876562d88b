import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'projectconfig.settings')
django.setup()
