import sys

import django
from django.conf import settings
from django.core.management.base import CommandError

PROG = 'assocmem'


def configure(verbosity=1):
    """
    Configure minimal Django settings for standalone use: the app installed and a stderr console handler on the
    `assocmem` logger. Projects that already configured settings keep their own.
    """
    if settings.configured:
        return
    settings.configure(
        INSTALLED_APPS=['assocmem'],
        LOGGING={
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {
                'plain': {'format': '%(levelname)s %(name)s: %(message)s'},
            },
            'handlers': {
                'stderr': {'class': 'logging.StreamHandler', 'stream': 'ext://sys.stderr', 'formatter': 'plain'},
            },
            'loggers': {
                'assocmem': {'handlers': ['stderr'], 'level': 'WARNING', 'propagate': False},
            },
        },
    )
    django.setup()


def main(argv=None, stdout=None, stderr=None):
    """
    Run the `assocmem` management command without a Django project.

    :type argv: list[str]
    :param argv: Arguments after the program name, sys.argv[1:] when None
    :rtype: int
    :return: 0 on success, 1 on usage or parse errors, 2 on resource limits
    """
    configure()
    from .management.commands.assocmem import Command

    argv = sys.argv[1:] if argv is None else list(argv)
    stderr = sys.stderr if stderr is None else stderr
    command = Command(stdout=stdout, stderr=stderr)
    parser = command.create_parser(PROG, 'assocmem')
    try:
        options = vars(parser.parse_args(argv))
        args = options.pop('args', ())
        command.execute(*args, **options)
    except CommandError as error:
        stderr.write('{}: {}\n'.format(PROG, error))
        return error.returncode
    except SystemExit as exit:
        # --help exits 0; argparse errors that bypass CommandParser exit 2 and are usage errors
        return 0 if not exit.code else 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
