"""Fixed-grid binning of continuous state and action vectors into integer codes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np


class MalformedInputError(ValueError):
    """A value that cannot be symbolized (non-finite, wrong type)."""


class ConfigurationError(ValueError):
    """Inconsistent configuration or dimension mismatch."""


class SymbolTriple(NamedTuple):
    s: int
    a: int
    s_next: int


def _per_dim(value, dims: int, name: str) -> tuple:
    if isinstance(value, (int, float)):
        return tuple([value] * dims)
    out = tuple(value)
    if len(out) != dims:
        raise ConfigurationError(f"{name} has {len(out)} entries, expected {dims}")
    return out


@dataclass(frozen=True)
class SymbolizerConfig:
    """Grid layout for states and actions.

    Scalars are broadcast over ``dims``. Codes are mixed-radix with
    dimension 0 most significant.
    """

    state_lo: Sequence[float] | float = -0.5
    state_hi: Sequence[float] | float = 0.5
    state_bins: Sequence[int] | int = 10
    action_lo: Sequence[float] | float = -1.0
    action_hi: Sequence[float] | float = 1.0
    action_bins: Sequence[int] | int = 7
    dims: int = 3
    n_state_symbols: int = field(init=False)
    n_action_symbols: int = field(init=False)

    def __post_init__(self):
        if int(self.dims) < 1:
            raise ConfigurationError("dims must be >= 1")
        d = int(self.dims)
        for name in ("state_lo", "state_hi", "action_lo", "action_hi"):
            vals = tuple(float(v) for v in _per_dim(getattr(self, name), d, name))
            object.__setattr__(self, name, vals)
        for name in ("state_bins", "action_bins"):
            vals = tuple(int(v) for v in _per_dim(getattr(self, name), d, name))
            if any(v < 1 for v in vals):
                raise ConfigurationError(f"{name} must all be >= 1")
            object.__setattr__(self, name, vals)
        for lo, hi in zip(self.state_lo + self.action_lo, self.state_hi + self.action_hi):
            if not lo < hi:
                raise ConfigurationError(f"bounds require lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "n_state_symbols", math.prod(self.state_bins))
        object.__setattr__(self, "n_action_symbols", math.prod(self.action_bins))

    def to_dict(self) -> dict:
        return {
            "state_lo": list(self.state_lo),
            "state_hi": list(self.state_hi),
            "state_bins": list(self.state_bins),
            "action_lo": list(self.action_lo),
            "action_hi": list(self.action_hi),
            "action_bins": list(self.action_bins),
            "dims": self.dims,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SymbolizerConfig":
        keys = ("state_lo", "state_hi", "state_bins", "action_lo", "action_hi", "action_bins", "dims")
        unknown = set(d) - set(keys)
        if unknown:
            raise ConfigurationError(f"unknown symbolizer keys: {sorted(unknown)}")
        return cls(**{k: d[k] for k in keys if k in d})


DEFAULT_CONFIG = SymbolizerConfig()


def bin_value(x: float, lo: float, hi: float, n_bins: int) -> int:
    """Bin index of ``x`` on ``n_bins`` equal cells over [lo, hi], edges clamped."""
    if not lo < hi or n_bins < 1:
        raise ConfigurationError("bin_value requires lo < hi and n_bins >= 1")
    try:
        xf = float(x)
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"not a number: {x!r}") from exc
    if not math.isfinite(xf):
        raise MalformedInputError(f"non-finite value: {x!r}")
    b = math.floor((xf - lo) / (hi - lo) * n_bins)
    if b < 0:
        return 0
    if b > n_bins - 1:
        return n_bins - 1
    return int(b)


def encode(bins: Sequence[int], radix: Sequence[int]) -> int:
    code = 0
    for b, r in zip(bins, radix):
        code = code * r + int(b)
    return code


def decode(code: int, radix: Sequence[int]) -> tuple[int, ...]:
    total = math.prod(radix)
    if not 0 <= int(code) < total:
        raise MalformedInputError(f"code {code} outside [0, {total})")
    out = []
    c = int(code)
    for r in reversed(radix):
        out.append(c % r)
        c //= r
    return tuple(reversed(out))


def _symbolize(v, lo, hi, bins, dims) -> int:
    vals = list(v)
    if len(vals) != dims:
        raise ConfigurationError(f"vector has {len(vals)} components, expected {dims}")
    return encode([bin_value(x, l, h, n) for x, l, h, n in zip(vals, lo, hi, bins)], bins)


def symbolize_state(v: Sequence[float], cfg: SymbolizerConfig = DEFAULT_CONFIG) -> int:
    return _symbolize(v, cfg.state_lo, cfg.state_hi, cfg.state_bins, cfg.dims)


def symbolize_action(v: Sequence[float], cfg: SymbolizerConfig = DEFAULT_CONFIG) -> int:
    return _symbolize(v, cfg.action_lo, cfg.action_hi, cfg.action_bins, cfg.dims)


def decode_state(code: int, cfg: SymbolizerConfig = DEFAULT_CONFIG) -> tuple[int, ...]:
    return decode(code, cfg.state_bins)


def decode_action(code: int, cfg: SymbolizerConfig = DEFAULT_CONFIG) -> tuple[int, ...]:
    return decode(code, cfg.action_bins)


def action_centers(code: int, cfg: SymbolizerConfig = DEFAULT_CONFIG) -> tuple[float, ...]:
    """Continuous action at the center of each level's bin."""
    levels = decode_action(code, cfg)
    return tuple(
        lo + (hi - lo) * (2 * k + 1) / (2 * n)
        for k, lo, hi, n in zip(levels, cfg.action_lo, cfg.action_hi, cfg.action_bins)
    )


def symbolize_triple(s, a, s_next, cfg: SymbolizerConfig = DEFAULT_CONFIG) -> SymbolTriple:
    return SymbolTriple(symbolize_state(s, cfg), symbolize_action(a, cfg), symbolize_state(s_next, cfg))


def _codes(values, lo, hi, bins) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.ndim != 2 or x.shape[1] != len(bins):
        raise ConfigurationError(f"expected an (n, {len(bins)}) array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise MalformedInputError("non-finite value in batch")
    lo_a, hi_a, nb = np.asarray(lo), np.asarray(hi), np.asarray(bins, dtype=np.int64)
    b = np.floor((x - lo_a) / (hi_a - lo_a) * nb)
    b = np.clip(b, 0, nb - 1).astype(np.int64)
    code = np.zeros(len(x), dtype=np.int64)
    for i in range(len(bins)):
        code = code * nb[i] + b[:, i]
    return code


def symbolize_states(values, cfg: SymbolizerConfig = DEFAULT_CONFIG):
    """Vectorized :func:`symbolize_state` over an (n, dims) array."""
    return _codes(values, cfg.state_lo, cfg.state_hi, cfg.state_bins)


def symbolize_actions(values, cfg: SymbolizerConfig = DEFAULT_CONFIG):
    return _codes(values, cfg.action_lo, cfg.action_hi, cfg.action_bins)
