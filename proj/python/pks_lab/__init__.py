"""Python bindings for the radial aggregation-diffusion lab."""

from ._core import *  # noqa: F401,F403
from ._core import PksError, __doc__  # noqa: F401

__version__ = "0.3.1"
