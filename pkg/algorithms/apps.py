from django.apps import AppConfig


class AlgorithmsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'algorithms'
    verbose_name = '分位数置信区间算法'
