from django.apps import AppConfig


class QmacroConfig(AppConfig):
    name = 'apps.qmacro'
    verbose_name = 'Macroscopic qudit phase space'
