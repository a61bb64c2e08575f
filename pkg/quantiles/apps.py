from django.apps import AppConfig


class QuantilesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'quantiles'
    verbose_name = '已知参数的多元分位数'
