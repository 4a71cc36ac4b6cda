"""Sparse occurrence counts over symbol triples: cumulative and sliding-window."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .symbolizer import SymbolTriple

_TABLES = ("c_s", "c_a", "c_snext", "c_sa", "c_asnext", "c_ssnext", "c_sasnext")


def _inc(d: dict, key, k: int) -> None:
    d[key] = d.get(key, 0) + k


def _dec(d: dict, key) -> None:
    c = d[key] - 1
    if c:
        d[key] = c
    else:
        del d[key]


class CountTable:
    """Marginal and joint counts for S, A, S' and their pairs/triple.

    Keys with zero count are never stored, so ``len`` of a map is its support.
    """

    __slots__ = ("n",) + _TABLES

    def __init__(self):
        self.n = 0
        for name in _TABLES:
            setattr(self, name, {})

    @classmethod
    def from_triples(cls, triples: Iterable) -> "CountTable":
        t = cls()
        for s, a, sn in triples:
            t.add(s, a, sn)
        return t

    def add(self, s: int, a: int, s_next: int, k: int = 1) -> None:
        if k < 1:
            raise ValueError("increment must be a positive integer")
        self.n += k
        _inc(self.c_s, s, k)
        _inc(self.c_a, a, k)
        _inc(self.c_snext, s_next, k)
        _inc(self.c_sa, (s, a), k)
        _inc(self.c_asnext, (a, s_next), k)
        _inc(self.c_ssnext, (s, s_next), k)
        _inc(self.c_sasnext, (s, a, s_next), k)

    def remove(self, s: int, a: int, s_next: int) -> None:
        if self.c_sasnext.get((s, a, s_next), 0) < 1:
            raise KeyError(f"triple {(s, a, s_next)} not present")
        self.n -= 1
        _dec(self.c_s, s)
        _dec(self.c_a, a)
        _dec(self.c_snext, s_next)
        _dec(self.c_sa, (s, a))
        _dec(self.c_asnext, (a, s_next))
        _dec(self.c_ssnext, (s, s_next))
        _dec(self.c_sasnext, (s, a, s_next))

    def copy(self) -> "CountTable":
        t = CountTable()
        t.n = self.n
        for name in _TABLES:
            setattr(t, name, dict(getattr(self, name)))
        return t

    def scaled(self, k: int) -> "CountTable":
        if k < 1:
            raise ValueError("scale factor must be a positive integer")
        t = CountTable()
        t.n = self.n * k
        for name in _TABLES:
            setattr(t, name, {key: c * k for key, c in getattr(self, name).items()})
        return t

    def relabeled(self, fs, fa, fsn=None) -> "CountTable":
        """Apply code bijections (callables or mappings) to every key."""
        fs = fs.__getitem__ if isinstance(fs, dict) else fs
        fa = fa.__getitem__ if isinstance(fa, dict) else fa
        fsn = fs if fsn is None else (fsn.__getitem__ if isinstance(fsn, dict) else fsn)
        t = CountTable()
        for (s, a, sn), c in self.c_sasnext.items():
            t.add(fs(s), fa(a), fsn(sn), c)
        return t

    def triple_counts(self) -> dict:
        return dict(self.c_sasnext)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CountTable):
            return NotImplemented
        return self.n == other.n and all(getattr(self, k) == getattr(other, k) for k in _TABLES)

    def __repr__(self) -> str:
        s, a, sn = support_sizes(self)
        return f"CountTable(n={self.n}, support=({s}, {a}, {sn}), triples={len(self.c_sasnext)})"


def support_sizes(table: CountTable) -> tuple[int, int, int]:
    return len(table.c_s), len(table.c_a), len(table.c_snext)


class WindowedAccumulator:
    """Cumulative table plus a bounded ring of the last ``window`` triples.

    ``n_state``/``n_action`` enable range checks on recorded codes.
    """

    def __init__(self, window: int = 2000, boundary: int = 5000, n_state: int | None = None,
                 n_action: int | None = None):
        if window < 1 or boundary < 1:
            raise ValueError("window and boundary must be >= 1")
        self.window = int(window)
        self.boundary = int(boundary)
        self.n_state = n_state
        self.n_action = n_action
        self.cumulative = CountTable()
        self.window_table = CountTable()
        self.ring: deque = deque()

    def _check(self, s, a, sn) -> None:
        if self.n_state is not None and not (0 <= s < self.n_state and 0 <= sn < self.n_state):
            raise ValueError(f"state code out of range in {(s, a, sn)}")
        if self.n_action is not None and not 0 <= a < self.n_action:
            raise ValueError(f"action code out of range in {(s, a, sn)}")

    def record(self, triple) -> "WindowedAccumulator":
        s, a, sn = triple
        self._check(s, a, sn)
        self.cumulative.add(s, a, sn)
        if len(self.ring) == self.window:
            self.window_table.remove(*self.ring.popleft())
        self.ring.append(SymbolTriple(s, a, sn))
        self.window_table.add(s, a, sn)
        return self

    def extend(self, triples: Iterable) -> "WindowedAccumulator":
        for t in triples:
            self.record(t)
        return self

    @property
    def n(self) -> int:
        return self.cumulative.n

    @property
    def at_boundary(self) -> bool:
        return self.cumulative.n > 0 and self.cumulative.n % self.boundary == 0

    def cumulative_counts(self) -> CountTable:
        return self.cumulative.copy()

    def sliding_counts(self) -> CountTable:
        return self.window_table.copy()


def record(acc: WindowedAccumulator, t) -> WindowedAccumulator:
    return acc.record(t)


def cumulative_counts(acc: WindowedAccumulator) -> CountTable:
    return acc.cumulative_counts()


def sliding_counts(acc: WindowedAccumulator) -> CountTable:
    return acc.sliding_counts()
