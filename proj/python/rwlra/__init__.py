"""Regularized weighted low rank approximation with sketched solvers."""

try:
    from ._rwlra import *  # noqa: F401,F403  (installed package layout)
    from ._rwlra import __version__  # noqa: F401
except ImportError:  # in-tree test layout: extension module on sys.path
    from _rwlra import *  # noqa: F401,F403
    from _rwlra import __version__  # noqa: F401
