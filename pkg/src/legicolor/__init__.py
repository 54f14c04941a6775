"""legicolor: legitimate colorings of finite projective planes.

A coloring of a plane's points is legitimate when all lines receive distinct
types (per-color point counts).  The package builds PG(2,q), searches for
legitimate colorings with a resampling algorithm whose run register is
losslessly decodable, and evaluates the analytic color bounds and the
feasibility region relating plane order to color count.
"""

__version__ = "0.1.0"

from . import bounds, coloring, feasibility, gf, plane, solver  # noqa: F401
from .gf import gf_build
from .plane import build_pg2, load_plane, save_plane, validate_plane

__all__ = [
    "bounds", "coloring", "feasibility", "gf", "plane", "solver",
    "gf_build", "build_pg2", "validate_plane", "save_plane", "load_plane",
    "__version__",
]
