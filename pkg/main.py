"""graphlim command-line entry point."""

from adapters.cli.main import app


if __name__ == "__main__":
    app()
