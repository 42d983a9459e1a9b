"""Score functions applied to regression residuals.

Every statistic in the package is built from a nondecreasing, skew-symmetric
score psi and its almost-everywhere derivative.  Two families are shipped:
Huber's clipped identity (the workhorse, default clip at 1.28) and the plain
identity, which reduces every M-quantity to its least-squares counterpart and
therefore doubles as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams

HUBER_DEFAULT_K = 1.28


@dataclass(frozen=True)
class ScoreFunction:
    """A nondecreasing, skew-symmetric score; ``k`` is only meaningful for huber."""

    kind: str
    k: float = HUBER_DEFAULT_K

    def __post_init__(self):
        if self.kind not in ("huber", "identity"):
            raise InvalidParams(f"unknown score kind {self.kind!r}")
        if self.kind == "huber" and not self.k > 0.0:
            raise InvalidParams(f"huber clip constant must be positive, got {self.k}")


def huber(k: float = HUBER_DEFAULT_K) -> ScoreFunction:
    return ScoreFunction("huber", float(k))


def identity() -> ScoreFunction:
    return ScoreFunction("identity")


def psi(score: ScoreFunction, u):
    """Evaluate psi at ``u`` (scalar or array).

    huber: u clipped to [-k, k].  identity: u unchanged.
    """
    arr = np.asarray(u, dtype=float)
    if score.kind == "huber":
        out = np.clip(arr, -score.k, score.k)
    else:
        out = arr
    return float(out) if arr.ndim == 0 else out


def psi_prime(score: ScoreFunction, u):
    """Evaluate the a.e. derivative of psi at ``u`` (scalar or array).

    huber: 1 on |u| <= k (closed at the kink), 0 outside.  identity: 1.
    """
    arr = np.asarray(u, dtype=float)
    if score.kind == "huber":
        out = (np.abs(arr) <= score.k).astype(float)
    else:
        out = np.ones_like(arr)
    return float(out) if arr.ndim == 0 else out
