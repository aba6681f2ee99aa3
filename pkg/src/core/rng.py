from typing import Sequence

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .errors import DomainError

UINT64_LIMIT = 1 << 64


class RngStream:
  """
  A reproducible stream of random numbers identified by ``(seed, stream_id)``.

  Built on numpy's counter-based Philox bit generator. The key is derived from a
  ``SeedSequence`` whose spawn key is ``(stream_id, *path)``, so replicate ``r`` can use
  ``stream_id=r`` with no sequential dependence on any other replicate, and ``child(i)`` gives
  a further independent sub-stream without touching the parent's counter.

  A stream is owned by exactly one run / thread; it is not safe to share one between threads.
  """

  def __init__(self, seed: int, stream_id: int = 0, path: Sequence[int] = ()) -> None:
    for name, value in [("seed", seed), ("stream_id", stream_id), *(("path", p) for p in path)]:
      if not 0 <= int(value) < UINT64_LIMIT:
        raise DomainError(f"{name} must be a 64-bit unsigned integer, got {value}")

    self.seed = int(seed)
    self.stream_id = int(stream_id)
    self.path = tuple(int(p) for p in path)
    sequence = SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
    self._generator = Generator(Philox(sequence))

  def __repr__(self) -> str:
    return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"

  @property
  def generator(self) -> Generator:
    """Underlying numpy Generator, for the rare call not wrapped here."""
    return self._generator

  def child(self, index: int) -> "RngStream":
    """Independent sub-stream keyed by ``(stream_id, *path, index)``."""
    return RngStream(self.seed, self.stream_id, (*self.path, index))

  def uniform(self, size: int | tuple[int, ...] | None = None):
    """Uniform draws in [0, 1)."""
    return self._generator.random(size)

  def normal(self, shape: int | tuple[int, ...]) -> np.ndarray:
    """Standard normal draws with the given shape."""
    return self._generator.standard_normal(shape)

  def integers(self, high: int, size: int | tuple[int, ...] | None = None):
    """Uniform integers in {0, ..., high-1}."""
    return self._generator.integers(0, high, size=size)

  def geometric(self, q: float, size: int | tuple[int, ...] | None = None):
    """Geometric draws on {1, 2, ...} with success probability q."""
    return self._generator.geometric(q, size=size)

  def choice(self, n: int, p: np.ndarray | None = None, size: int | tuple[int, ...] | None = None):
    """Draw indices in {0, ..., n-1} with probabilities p."""
    return self._generator.choice(n, size=size, p=p)


def make_stream(seed: int, stream_id: int) -> RngStream:
  """Deterministic stream: the same arguments always produce the same sequence."""
  return RngStream(seed, stream_id)


def standard_normal(stream: RngStream, n: int) -> np.ndarray:
  """Draw n i.i.d. standard normal values, advancing the stream.

  Args:
      stream (RngStream): stream to draw from
      n (int): number of draws, n >= 0

  Returns:
      np.ndarray: array of shape (n,)
  """
  if n < 0:
    raise DomainError(f"n must be non-negative, got {n}")
  return stream.normal(n)
