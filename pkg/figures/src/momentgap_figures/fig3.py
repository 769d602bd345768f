import sys

from .core import script_main


def main(argv=None) -> int:
    return script_main("fig3", argv)


if __name__ == "__main__":
    sys.exit(main())
