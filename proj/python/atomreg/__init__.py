"""Gaussian-atom pattern registration."""

from ._atomreg import *  # noqa: F401,F403
from ._atomreg import __doc__  # noqa: F401
