"""Zero-order-hold channel and additive measurement noise."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class ZohChannel:
    """Ideal ZOH channel: node ``i`` holds its last transmitted output.

    Values change only through `transmit`; the object is immutable so a
    snapshot can be stored in a trace without copying.
    """

    partition: tuple
    held: np.ndarray
    last_tx: tuple = ()

    def __post_init__(self):
        held = np.array(self.held, dtype=float)
        held.setflags(write=False)
        object.__setattr__(self, "held", held)
        if not self.last_tx:
            object.__setattr__(self, "last_tx", tuple(None for _ in self.partition))

    @classmethod
    def initial(cls, partition: Sequence[int], y0) -> "ZohChannel":
        """Channel initialised with ``ybar(0) = y0`` (so ``e(0) = 0``)."""
        return cls(tuple(int(w) for w in partition), np.asarray(y0, dtype=float))

    def _slice(self, node: int) -> slice:
        off = np.concatenate([[0], np.cumsum(self.partition)]).astype(int)
        return slice(off[node - 1], off[node])

    def held_output(self, node: int) -> np.ndarray:
        """Value currently held for ``node`` (1-based)."""
        return self.held[self._slice(node)].copy()

    def transmit(self, node: int, y_node, when=None) -> "ZohChannel":
        """New channel state after ``node`` sends ``y_node``; other nodes untouched."""
        held = self.held.copy()
        held[self._slice(node)] = y_node
        last = list(self.last_tx)
        last[node - 1] = when
        return replace(self, held=held, last_tx=tuple(last))


def held_output(channel: ZohChannel, node: int) -> np.ndarray:
    return channel.held_output(node)


@dataclass(frozen=True)
class NoiseModel:
    """Additive output noise ``y~ = y + m(t)`` with per-node amplitude bounds."""

    bounds: np.ndarray
    m: Callable = field(default=None)
    m_dot: Callable = field(default=None)

    @classmethod
    def from_signals(cls, signals, partition: Sequence[int]) -> "NoiseModel":
        comp = np.asarray(signals.m_bounds(), dtype=float)
        off = np.concatenate([[0], np.cumsum(partition)]).astype(int)
        per_node = np.array([np.linalg.norm(comp[off[i]:off[i + 1]])
                             for i in range(len(partition))])
        return cls(per_node, signals.m, signals.m_dot)

    @property
    def enabled(self) -> bool:
        return bool(np.any(self.bounds > 0))

    def max_sampled(self, times, partition: Sequence[int]) -> np.ndarray:
        """Largest per-node ``|m_i(t)|`` over ``times``."""
        off = np.concatenate([[0], np.cumsum(partition)]).astype(int)
        out = np.zeros(len(partition))
        for t in times:
            mt = np.atleast_1d(self.m(t))
            for i in range(len(partition)):
                out[i] = max(out[i], np.linalg.norm(mt[off[i]:off[i + 1]]))
        return out
