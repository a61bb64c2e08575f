from django.apps import AppConfig


class MeshesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'meshes'
    verbose_name = '网格CDF与分位数几何'
