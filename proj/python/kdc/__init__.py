"""Distributional-kernel clustering: isolation-kernel mean maps, kernel-bounded
cluster cores, and a deterministic multi-site simulation."""

try:
    from ._kdc import *  # noqa: F401,F403  (installed layout)
    from ._kdc import __version__  # noqa: F401
except ImportError:  # build-tree layout: the extension sits next to the package
    from _kdc import *  # noqa: F401,F403
    from _kdc import __version__  # noqa: F401
