"""Command-line launcher: python cli.py <command> ..."""
from src.cli.commands import main

if __name__ == "__main__":
    main()
