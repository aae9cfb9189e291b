"""Diversity-constrained batch selection from optimization portfolios."""

try:
    from ._divsel import *  # noqa: F401,F403
    from ._divsel import __version__
except ImportError:
    from _divsel import *  # noqa: F401,F403
    from _divsel import __version__
