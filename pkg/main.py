import os
import sys


COMMANDS = {"verify": "verify", "list-checks": "list_checks"}


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "conformal_project.settings")
    from django.core.management import execute_from_command_line

    args = sys.argv[1:]
    if not args or args[0] not in COMMANDS:
        print(f"usage: {sys.argv[0]} {{{','.join(COMMANDS)}}} [options]", file=sys.stderr)
        sys.exit(2)
    execute_from_command_line([sys.argv[0], COMMANDS[args[0]], *args[1:]])


if __name__ == "__main__":
    main()
