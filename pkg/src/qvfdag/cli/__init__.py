"""Command-line interface: simulate, learn, eval, bench."""

from qvfdag.cli.main import build_parser, main

__all__ = ["build_parser", "main"]
