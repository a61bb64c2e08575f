from django.apps import AppConfig


class MvnConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mvn'
    verbose_name = '多元正态分布'
