import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'capkit.settings.development')
django.setup()
