from django.apps import AppConfig


class NormalityConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'normality'
    verbose_name = '正态性诊断'
