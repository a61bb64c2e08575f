from django.apps import AppConfig


class CasestudyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'casestudy'
    verbose_name = '冲击环境规范案例'
