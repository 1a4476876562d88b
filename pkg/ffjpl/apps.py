from django.apps import AppConfig


class FfjplConfig(AppConfig):
    name = 'ffjpl'
    verbose_name = 'Feature Featherweight Java product lines'
