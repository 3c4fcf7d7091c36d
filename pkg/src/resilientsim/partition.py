"""Geometric partition of the control horizon.

The horizon ``[0, t_f]`` is split at nodes ``t_n = t_f - t_f * 0.5**n``
(algebraically ``(2**n - 1) / 2**n * t_f``, but written in the subtracted
form so late nodes do not lose precision to cancellation).  Interval n runs
from ``t_{n-1}`` to ``t_n`` and has length ``t_f / 2**n``.  The sequence is
truncated at a depth ``n_bar``: the last interval is the merged tail
``[t_{n_bar - 1}, t_f]``, twice as long as interval ``n_bar`` proper would
have been, which spares the actuators one switch at an ever-shorter spacing.
"""

from dataclasses import dataclass

from .errors import DomainError

#: Refusing depths beyond this keeps interval lengths well above the spacing
#: of floats near t_f; 2**-50 * t_f is already far below any usable step.
MAX_DEPTH = 50


def partition_time(t_f, n):
    """Time of node n: ``t_f - t_f * 0.5**n``. Node 0 is 0.0."""
    if t_f <= 0.0:
        raise DomainError(f"horizon must be positive, got t_f={t_f}")
    if n < 0:
        raise DomainError(f"node index must be >= 0, got {n}")
    return t_f - t_f * 0.5 ** n


def interval_length(t_f, n):
    """Length of interval n (from node n-1 to node n): ``t_f / 2**n``."""
    if t_f <= 0.0:
        raise DomainError(f"horizon must be positive, got t_f={t_f}")
    if n < 1:
        raise DomainError(f"interval index must be >= 1, got {n}")
    return t_f * 0.5 ** n


@dataclass(frozen=True)
class Interval:
    """One piece of the truncated partition."""

    n: int
    t_start: float
    t_end: float

    @property
    def length(self):
        return self.t_end - self.t_start


@dataclass(frozen=True)
class HorizonPartition:
    """Node times [0, t_1, ..., t_{n_bar-1}, t_f] of the truncated partition.

    `boundaries` always has n_bar + 1 entries and ends exactly at t_f; the
    final interval is the merged tail of length ``t_f / 2**(n_bar - 1)``.
    """

    t_f: float
    n_bar: int
    boundaries: tuple

    @property
    def intervals(self):
        """Interval records 1..n_bar; pieces abut exactly."""
        return [
            Interval(n=i + 1, t_start=self.boundaries[i], t_end=self.boundaries[i + 1])
            for i in range(self.n_bar)
        ]


def build_partition(t_f, n_bar):
    """Partition with nodes 0..n_bar-1 plus the merged tail ending at t_f.

    For ``n_bar == 1`` this is the single interval ``[0, t_f]``.
    """
    if t_f <= 0.0:
        raise DomainError(f"horizon must be positive, got t_f={t_f}")
    if n_bar < 1:
        raise DomainError(f"depth must be >= 1, got n_bar={n_bar}")
    if n_bar > MAX_DEPTH:
        raise DomainError(f"depth n_bar={n_bar} exceeds maximum {MAX_DEPTH}")
    boundaries = tuple(partition_time(t_f, n) for n in range(n_bar)) + (t_f,)
    return HorizonPartition(t_f=t_f, n_bar=n_bar, boundaries=boundaries)
