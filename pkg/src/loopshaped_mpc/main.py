"""Main entry point of the loopshaped-mpc command."""

import sys

from loopshaped_mpc.cli import cli_main


def main() -> None:
    """Run the command line with the process arguments and exit with its status."""
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
