"""Location-aware anchor-based box reasoning."""

from ._laar import *  # noqa: F401,F403
from ._laar import __doc__  # noqa: F401

__version__ = "0.1.0"
