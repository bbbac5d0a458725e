"""Policy gradient with the stochastic Polyak step-size."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # pragma: no cover
    from _core import *  # noqa: F401,F403  (in-build layout: module on sys.path)

__version__ = "0.1.0"
