"""SVEAIR epidemic dynamics coupled with a population-PHA signaling game."""

try:
    from ._episignal import *  # noqa: F401,F403
    from ._episignal import __doc__  # noqa: F401
except ImportError:  # in-tree builds place the extension on PYTHONPATH directly
    from _episignal import *  # noqa: F401,F403
    from _episignal import __doc__  # noqa: F401

__version__ = "0.1.0"
