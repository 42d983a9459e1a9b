"""Regressor-derived constants.

The tests and power formulas never see the raw regressor sequence directly;
they consume the handful of constants computed here: the mean, the centered
sum of squares, and the two normalizing constants used to standardize the
unrestricted and preliminary statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDesign, EmptyInput


@dataclass(frozen=True)
class Design:
    """Immutable regressor summary.

    ``cbar_limit`` and ``cstar2_limit`` are the finite-n stand-ins for the
    limiting mean and normalized centered sum of squares that the asymptotic
    formulas consume (``cbar_n`` and ``cstar2_n / n``).  ``max_leverage`` is
    max_i (c_i - cbar)^2 / cstar2_n, reported as a diagnostic only.
    """

    c: np.ndarray
    n: int
    cbar_n: float
    cstar2_n: float
    c1_n: float
    c3_n: float
    cbar_limit: float
    cstar2_limit: float
    max_leverage: float


def make_design(c) -> Design:
    """Build a Design from a regressor sequence.

    Raises EmptyInput for fewer than 2 values and DegenerateDesign when the
    regressor is constant (centered sum of squares is zero).
    """
    arr = np.array(c, dtype=float).ravel()
    n = arr.size
    if n < 2:
        raise EmptyInput(f"need at least 2 regressor values, got {n}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateDesign("regressor contains non-finite values")
    cbar = float(arr.mean())
    centered = arr - cbar
    cstar2 = float(centered @ centered)
    if cstar2 <= 0.0:
        raise DegenerateDesign("constant regressor: slope is unidentifiable")
    c1 = n * cstar2 / (cstar2 + n * cbar * cbar)
    max_leverage = float(np.max(centered * centered) / cstar2)
    arr.flags.writeable = False
    return Design(
        c=arr,
        n=n,
        cbar_n=cbar,
        cstar2_n=cstar2,
        c1_n=c1,
        c3_n=cstar2,
        cbar_limit=cbar,
        cstar2_limit=cstar2 / n,
        max_leverage=max_leverage,
    )
