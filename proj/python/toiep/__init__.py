"""Toeplitz inverse eigenvalue solvers and blind array calibration."""

from ._toiep import *  # noqa: F401,F403
from ._toiep import InvalidInput, NumericalError  # noqa: F401
