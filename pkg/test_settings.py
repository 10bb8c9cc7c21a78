SECRET_KEY = 'assocmem-tests'

INSTALLED_APPS = [
    'assocmem',
]

DATABASES = {}

ASSOCMEM_DEFAULT_WORKERS = 1

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'null': {'class': 'logging.NullHandler'},
    },
    'loggers': {
        'assocmem': {'handlers': ['null'], 'level': 'WARNING', 'propagate': False},
    },
}
