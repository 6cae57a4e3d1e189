"""Instrumentation: comparison/access counters and a counting array wrapper."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass
class OpCounter:
    """Per-invocation tally of data comparisons, data accesses and index work.

    Counters are plain objects handed in by the caller; nothing is global.
    """

    comparisons: int = 0
    accesses: int = 0
    internal_ops: int = 0

    def reset(self) -> None:
        self.comparisons = 0
        self.accesses = 0
        self.internal_ops = 0


class CountingArray(Sequence):
    """Read-only view over a sequence that counts every element read.

    Used to verify that non-systematic indices never touch the input after
    construction.
    """

    def __init__(self, values: Sequence[int]):
        self._values = list(values)
        self.reads = 0

    def __len__(self) -> int:
        return len(self._values)

    def __getitem__(self, k):
        if isinstance(k, slice):
            out = self._values[k]
            self.reads += len(out)
            return out
        self.reads += 1
        return self._values[k]

    def __iter__(self):
        self.reads += len(self._values)
        return iter(self._values)
