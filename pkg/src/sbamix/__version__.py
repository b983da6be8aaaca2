"""Version information for sbamix package."""

from importlib.metadata import version

__version__ = version("sbamix")
