"""Power-law class-K-infinity functions ``s -> k * s**p``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KinfFn:
    """Class-K-infinity function ``s -> k * s**p`` with ``k > 0``, ``p >= 1``.

    All gains in the package (ETM filter rates, ISS gains, decay rates)
    are drawn from this family.  Instances are callable and accept scalars
    or arrays of nonnegative arguments.
    """

    k: float
    p: float = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"KinfFn coefficient must be positive, got {self.k}")
        if not self.p >= 1:
            raise ValueError(f"KinfFn exponent must be >= 1, got {self.p}")

    def __call__(self, s):
        if self.p == 1.0:
            return self.k * s
        if self.p == 2.0:
            return self.k * s * s
        return self.k * np.power(s, self.p)

    def inverse(self, s):
        """Inverse map ``s -> (s / k)**(1/p)``."""
        if self.p == 1.0:
            return s / self.k
        return np.power(s / self.k, 1.0 / self.p)

    @classmethod
    def linear(cls, k: float) -> "KinfFn":
        return cls(float(k), 1.0)

    @classmethod
    def quadratic(cls, k: float) -> "KinfFn":
        return cls(float(k), 2.0)

    def to_dict(self) -> dict:
        return {"k": self.k, "p": self.p}

    @classmethod
    def from_dict(cls, d) -> "KinfFn":
        return cls(float(d["k"]), float(d.get("p", 1.0)))
