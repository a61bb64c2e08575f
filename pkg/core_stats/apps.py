from django.apps import AppConfig


class CoreStatsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'core_stats'
    verbose_name = '样本统计与标准化'
