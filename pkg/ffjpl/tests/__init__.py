import os

import hypothesis

_checks = [hypothesis.HealthCheck.too_slow, hypothesis.HealthCheck.data_too_large,
           hypothesis.HealthCheck.filter_too_much]

hypothesis.settings.register_profile('ffjpl', max_examples=1000, deadline=None, suppress_health_check=_checks)
hypothesis.settings.register_profile('quick', max_examples=50, deadline=None, suppress_health_check=_checks)
hypothesis.settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'ffjpl'))
