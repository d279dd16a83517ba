import os

import django


os.environ.setdefault("DJANGO_SETTINGS_MODULE", "giantwaveguide.settings.ci")
django.setup()
