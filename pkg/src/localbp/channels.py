"""Binary-input memoryless symmetric channels.

Bits map to symbols as 0 -> +1, 1 -> -1, so a positive LLR favours bit 0.
BSC and BEC outputs are small integers (0, 1, and ``ERASED`` for the BEC);
BI-AWGN outputs are reals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

#: Magnitude at which infinite or huge LLRs are clamped.
LLR_CLAMP = 50.0

ERASED = 2


class ChannelSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Channel:
    param: float
    kind: ClassVar[str] = ""
    #: Finite output alphabet, or None for continuous outputs.
    outputs: ClassVar[tuple[int, ...] | None] = None

    def __str__(self) -> str:
        return f"{self.kind}:{self.param:g}"

    def sample(self, x, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def llr(self, y) -> np.ndarray:
        raise NotImplementedError

    def log_prob(self, y, x) -> np.ndarray:
        """``log P(y | x)`` per symbol (log density for continuous outputs)."""
        raise NotImplementedError

    def degrade(self, q: float) -> "Channel":
        raise NotImplementedError

    def prob(self, y, x) -> np.ndarray:
        return np.exp(self.log_prob(y, x))


def _clamp(v):
    return np.clip(v, -LLR_CLAMP, LLR_CLAMP)


@dataclass(frozen=True)
class BSC(Channel):
    kind: ClassVar[str] = "bsc"
    outputs: ClassVar[tuple[int, ...]] = (0, 1)

    def __post_init__(self):
        if not 0.0 <= self.param <= 0.5:
            raise ChannelSpecError(f"BSC crossover must lie in [0, 0.5], got {self.param}")

    def sample(self, x, rng):
        x = np.asarray(x, dtype=np.uint8)
        flips = rng.random(x.shape) < self.param
        return x ^ flips.astype(np.uint8)

    def llr(self, y):
        p = self.param
        mag = LLR_CLAMP if p == 0 else math.log((1 - p) / p)
        y = np.asarray(y)
        return _clamp(np.where(y == 0, mag, -mag).astype(float))

    def log_prob(self, y, x):
        p = self.param
        agree = np.asarray(y) == np.asarray(x)
        with np.errstate(divide="ignore"):
            return np.where(agree, np.log1p(-p), np.log(p)).astype(float)

    def degrade(self, q):
        if not 0.0 <= q <= 0.5:
            raise ChannelSpecError(f"BSC degradation flip probability must lie in [0, 0.5], got {q}")
        p = self.param
        return BSC(p * (1 - q) + q * (1 - p))


@dataclass(frozen=True)
class BEC(Channel):
    kind: ClassVar[str] = "bec"
    outputs: ClassVar[tuple[int, ...]] = (0, 1, ERASED)

    def __post_init__(self):
        if not 0.0 <= self.param <= 1.0:
            raise ChannelSpecError(f"BEC erasure probability must lie in [0, 1], got {self.param}")

    def sample(self, x, rng):
        x = np.asarray(x, dtype=np.uint8)
        erased = rng.random(x.shape) < self.param
        return np.where(erased, ERASED, x).astype(np.uint8)

    def llr(self, y):
        y = np.asarray(y)
        out = np.where(y == 0, LLR_CLAMP, -LLR_CLAMP).astype(float)
        return np.where(y == ERASED, 0.0, out)

    def log_prob(self, y, x):
        eps = self.param
        y = np.asarray(y)
        x = np.asarray(x)
        with np.errstate(divide="ignore"):
            return np.where(y == ERASED, np.log(eps),
                            np.where(y == x, np.log1p(-eps), -np.inf)).astype(float)

    def degrade(self, q):
        if not 0.0 <= q <= 1.0:
            raise ChannelSpecError(f"BEC extra erasure probability must lie in [0, 1], got {q}")
        eps = self.param
        return BEC(eps + (1 - eps) * q)


@dataclass(frozen=True)
class BIAWGN(Channel):
    kind: ClassVar[str] = "biawgn"

    def __post_init__(self):
        if not self.param > 0:
            raise ChannelSpecError(f"BI-AWGN noise deviation must be positive, got {self.param}")

    def sample(self, x, rng):
        x = np.asarray(x)
        return 1.0 - 2.0 * x + self.param * rng.standard_normal(x.shape)

    def llr(self, y):
        return _clamp(2.0 * np.asarray(y, dtype=float) / self.param**2)

    def log_prob(self, y, x):
        s = 1.0 - 2.0 * np.asarray(x, dtype=float)
        sigma = self.param
        return -0.5 * ((np.asarray(y, dtype=float) - s) / sigma) ** 2 - math.log(sigma * math.sqrt(2 * math.pi))

    def degrade(self, q):
        if q < 0:
            raise ChannelSpecError(f"extra noise deviation must be non-negative, got {q}")
        return BIAWGN(math.hypot(self.param, q))


CHANNELS = {cls.kind: cls for cls in (BSC, BEC, BIAWGN)}


def parse_channel(spec: str) -> Channel:
    """Build a channel from ``"bsc:0.05"``, ``"biawgn:0.8"`` or ``"bec:0.3"``."""
    kind, sep, value = spec.strip().partition(":")
    if not sep or kind.lower() not in CHANNELS:
        raise ChannelSpecError(f"unknown channel {spec!r}; expected bsc:p, biawgn:sigma or bec:eps")
    try:
        param = float(value)
    except ValueError:
        raise ChannelSpecError(f"bad channel parameter {value!r} in {spec!r}") from None
    return CHANNELS[kind.lower()](param)


def likelihood(ch: Channel, y_I, x_I) -> float:
    """``log P(y_I | x_I)`` for a memoryless channel (sum of per-symbol terms)."""
    y_I = np.asarray(y_I)
    x_I = np.asarray(x_I)
    if y_I.shape != x_I.shape:
        raise ValueError(f"length mismatch: {y_I.shape} observations vs {x_I.shape} bits")
    return float(np.sum(ch.log_prob(y_I, x_I)))
