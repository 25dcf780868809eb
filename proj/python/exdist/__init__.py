"""Export-volume distribution toolkit.

Thin wrapper around the native core: comparative-advantage binarization, the
nonlinear fitness/complexity iteration, log-normal fitting with left-wing
refits, KS/CvM tests with parametric bootstrap, ranking-curve analytics and
the seeded synthetic generator.
"""

try:
    from ._exdist import *  # noqa: F401,F403  (installed package layout)
    from ._exdist import __version__  # noqa: F401
except ImportError:  # pragma: no cover - in-tree build layout
    from _exdist import *  # noqa: F401,F403
    from _exdist import __version__  # noqa: F401
