"""Box-bounded search domains."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

CONTINUOUS = "continuous"
INTEGER_ROUNDED = "integer_rounded"
KINDS = (CONTINUOUS, INTEGER_ROUNDED)


class DomainError(ValueError):
    """A coordinate lies outside its dimension's bounds."""


class ShapeError(ValueError):
    """A point does not have one coordinate per dimension."""


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass(frozen=True)
class ParamDomain:
    name: str
    low: float
    high: float
    kind: str = CONTINUOUS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r} for {self.name!r}; expected one of {KINDS}")
        low, high = float(self.low), float(self.high)
        if not (np.isfinite(low) and np.isfinite(high)):
            raise ValueError(f"bounds of {self.name!r} must be finite")
        if not low < high:
            raise ValueError(f"{self.name!r}: low ({low}) must be < high ({high})")
        if self.kind == INTEGER_ROUNDED and round_half_away(low) > round_half_away(high):
            raise ValueError(f"{self.name!r}: rounded bounds are inverted")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def width(self):
        return self.high - self.low


class SearchSpace:
    """Ordered collection of :class:`ParamDomain`. Immutable after construction."""

    def __init__(self, dims: Sequence[ParamDomain]):
        dims = tuple(dims)
        if not dims:
            raise ValueError("a search space needs at least one dimension")
        names = [p.name for p in dims]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate dimension names in {names}")
        self._dims = dims
        self._low = np.array([p.low for p in dims])
        self._high = np.array([p.high for p in dims])
        self._integer = np.array([p.kind == INTEGER_ROUNDED for p in dims])
        for a in (self._low, self._high, self._integer):
            a.setflags(write=False)

    @classmethod
    def unit_cube(cls, d, prefix="x"):
        return cls([ParamDomain(f"{prefix}{i}", 0.0, 1.0) for i in range(d)])

    @property
    def dims(self):
        return self._dims

    @property
    def d(self):
        return len(self._dims)

    @property
    def names(self):
        return [p.name for p in self._dims]

    @property
    def low(self):
        return self._low

    @property
    def high(self):
        return self._high

    @property
    def width(self):
        return self._high - self._low

    def __len__(self):
        return self.d

    def __eq__(self, other):
        return isinstance(other, SearchSpace) and self._dims == other._dims

    def __hash__(self):
        return hash(self._dims)

    def __repr__(self):
        return f"SearchSpace({list(self._dims)!r})"

    def validate(self, p):
        """Return ``p`` as a float array if every coordinate is in bounds.

        Accepts a single point of shape (d,) or a batch of shape (N, d).
        """
        arr = np.asarray(p, dtype=np.float64)
        if arr.ndim not in (1, 2) or arr.shape[-1] != self.d:
            raise ShapeError(f"expected {self.d} coordinates, got shape {arr.shape}")
        bad = (arr < self._low) | (arr > self._high) | ~np.isfinite(arr)
        if bad.any():
            k = int(np.nonzero(bad.reshape(-1, self.d).any(axis=0))[0][0])
            dim = self._dims[k]
            raise DomainError(
                f"coordinate {k} ({dim.name!r}) out of bounds [{dim.low}, {dim.high}]"
            )
        return arr

    def sample_uniform(self, rng, size=None):
        """Uniform draw(s) over the box; shape (d,) or (size, d)."""
        shape = (self.d,) if size is None else (size, self.d)
        u = rng.random(shape)
        x = self._low + u * (self._high - self._low)
        # low + u*width can round up to high + ulp
        return np.minimum(x, self._high)

    def externalize(self, p):
        """Values handed to an objective: integer dims rounded, others untouched."""
        arr = np.array(p, dtype=np.float64)
        if self._integer.any():
            arr[..., self._integer] = round_half_away(arr[..., self._integer])
        return arr


def validate(space, p):
    return space.validate(p)


def sample_uniform(space, rng):
    return space.sample_uniform(rng)


def externalize(space, p):
    return space.externalize(p)
