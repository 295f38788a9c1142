"""Field-operation counters used by the complexity benchmarks.

Wall-clock times at desk scale cannot resolve exponents like 6 or 8, so the
benchmark harness counts scalar field operations instead.  Vectorized numpy
routines tally their counts analytically (a dense n x m by m x k product is
n*m*k multiplications and n*k*(m-1) additions), which makes the totals exact
and deterministic.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class OpCounter:
    """Tally of scalar field operations inside an instrumented region.

    Subtractions and negations count as adds; divisions count as one inv
    plus one mul wherever they occur.
    """

    adds: int = 0
    muls: int = 0
    invs: int = 0

    @property
    def total(self) -> int:
        return self.adds + self.muls + self.invs

    def as_dict(self) -> dict:
        return {"adds": self.adds, "muls": self.muls, "invs": self.invs,
                "total": self.total}


_local = threading.local()


def _stack() -> list[OpCounter]:
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = []
        _local.stack = stack
    return stack


def tally(adds: int = 0, muls: int = 0, invs: int = 0) -> None:
    """Credit operation counts to every active counter (no-op when none)."""
    for counter in _stack():
        counter.adds += adds
        counter.muls += muls
        counter.invs += invs


@contextmanager
def count_ops(counter: OpCounter | None = None):
    """Activate a counter for the enclosed region and yield it.

    Regions nest: an inner region also contributes to every enclosing
    counter, so a counter sees all field work performed while active.
    Counters are thread-local; parallel workers must open their own.
    """
    counter = counter if counter is not None else OpCounter()
    stack = _stack()
    stack.append(counter)
    try:
        yield counter
    finally:
        stack.pop()
