from pathlib import Path
import os
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/5.2/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-quantile-system-local-development-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=True, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=lambda v: [s.strip() for s in v.split(',')])

# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.staticfiles',

    # 第三方应用
    'rest_framework',
    'drf_spectacular',  # API文档生成

    # 本地应用
    'core_stats',
    'mvn',
    'quantiles',
    'meshes',
    'bootstrap',
    'algorithms',
    'tolerance',
    'normality',
    'simulation',
    'casestudy',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'quantile_system.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
            ],
        },
    },
]

WSGI_APPLICATION = 'quantile_system.wsgi.application'


# Database
# 计算服务无持久化模型，sqlite 仅供测试运行器与 manage.py check 使用

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('DB_NAME', default=str(BASE_DIR / 'db.sqlite3')),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'zh-hans'

TIME_ZONE = 'Asia/Shanghai'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)

STATIC_URL = 'static/'
STATIC_ROOT = BASE_DIR / 'staticfiles'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# 分位数计算配置（均可通过 .env 覆盖）
QUANTILE = {
    # 多元正态CDF绝对误差容限与最大积分点数
    'CDF_ABS_TOL': config('QUANTILE_CDF_ABS_TOL', default=1e-6, cast=float),
    'CDF_MAX_EVALS': config('QUANTILE_CDF_MAX_EVALS', default=10_000_000, cast=int),
    # 网格张量单元数上限（超过则在分配前报错）
    'MAX_GRID_CELLS': config('QUANTILE_MAX_GRID_CELLS', default=2 ** 31, cast=int),
    'BOOTSTRAP_B': config('QUANTILE_BOOTSTRAP_B', default=1000, cast=int),
    # 0 表示使用全部CPU核
    'THREADS': config('QUANTILE_THREADS', default=0, cast=int),
    'OUT_DIR': config('QUANTILE_OUT_DIR', default=str(BASE_DIR / 'output')),
    'CHI2_CAP': config('QUANTILE_CHI2_CAP', default=1e308, cast=float),
}

# 全规模的慢速复现测试，默认跳过
QUANTILE_SLOW_TESTS = config('QUANTILE_SLOW_TESTS', default=False, cast=bool)

QUANTILE_LOG_FILE = config('QUANTILE_LOG_FILE', default='')
QUANTILE_LOG_LEVEL = config('QUANTILE_LOG_LEVEL', default='INFO')

# Ensure log directories exist for file handlers
if QUANTILE_LOG_FILE:
    try:
        os.makedirs(Path(QUANTILE_LOG_FILE).resolve().parent, exist_ok=True)
    except Exception:
        pass

REST_FRAMEWORK = {
    # 纯计算接口，不需要认证
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': (
        'rest_framework.permissions.AllowAny',
    ),
    'UNAUTHENTICATED_USER': None,

    # 异常处理
    'EXCEPTION_HANDLER': 'utils.response.custom_exception_handler',

    # API文档生成器
    'DEFAULT_SCHEMA_CLASS': 'drf_spectacular.openapi.AutoSchema',
}

# 禁用Django自动添加尾部斜杠
APPEND_SLASH = False

_log_handlers = {
    'console': {
        'level': 'DEBUG',
        'class': 'logging.StreamHandler',
        'stream': 'ext://sys.stderr',
        'formatter': 'verbose',
    },
}
if QUANTILE_LOG_FILE:
    _log_handlers['quantile_file'] = {
        'level': 'INFO',
        'class': 'logging.FileHandler',
        'filename': QUANTILE_LOG_FILE,
        'formatter': 'verbose',
        'encoding': 'utf-8',
    }

_quantile_logger = {
    'handlers': list(_log_handlers),
    'level': QUANTILE_LOG_LEVEL,
    'propagate': False,
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s - %(levelname)s - %(name)s - %(message)s',
        },
    },
    'handlers': _log_handlers,
    'loggers': {
        app: _quantile_logger
        for app in (
            'core_stats', 'mvn', 'quantiles', 'meshes', 'bootstrap', 'algorithms',
            'tolerance', 'normality', 'simulation', 'casestudy', 'utils',
        )
    },
}

# drf-spectacular API文档配置
SPECTACULAR_SETTINGS = {
    'TITLE': '多元正态分位数置信区间 API',
    'DESCRIPTION': '基于CDF的多元正态分位数、临界点置信区间与容差基准的RESTful计算接口',
    'VERSION': '1.0.0',
    'SERVE_INCLUDE_SCHEMA': False,
    'SCHEMA_PATH_PREFIX': '/api/',
}
