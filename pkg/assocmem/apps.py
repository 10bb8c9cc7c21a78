from django.apps import AppConfig


class AssocmemConfig(AppConfig):
    name = 'assocmem'
    verbose_name = 'Associative memories'
