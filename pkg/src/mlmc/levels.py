import math
from dataclasses import dataclass

import numpy as np

from src.config.config import DEFAULT_LEVEL_Q
from src.core.errors import ConfigurationError, DomainError
from src.core.rng import RngStream

PMF_SUM_TOLERANCE = 1e-12
MAX_SEARCH_LEVEL = 4096


@dataclass(frozen=True)
class LevelDistribution:
    """
    Distribution mu of the correction level K on {1, 2, ...}.

    Either geometric with success probability ``q`` (mu(k) = q(1-q)^(k-1)) or an explicit finite pmf
    on {1..m}. Build it through ``geometric`` / ``finite``.
    """
    q: float | None = DEFAULT_LEVEL_Q
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.weights is None:
            if self.q is None or not 0.0 < self.q < 1.0:
                raise DomainError(f"geometric level distribution needs q in (0, 1), got {self.q}")
            return

        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DomainError("finite level pmf must be a non-empty sequence")
        if np.any(w <= 0.0):
            raise DomainError("finite level pmf must be strictly positive on its support")
        if np.any(np.diff(w) > 0.0):
            raise DomainError("level pmf must be non-increasing in k")
        if abs(math.fsum(self.weights) - 1.0) > PMF_SUM_TOLERANCE:
            raise DomainError(f"level pmf sums to {math.fsum(self.weights)}, expected 1")

    @classmethod
    def geometric(cls, q: float = DEFAULT_LEVEL_Q) -> "LevelDistribution":
        return cls(q=q, weights=None)

    @classmethod
    def finite(cls, pmf) -> "LevelDistribution":
        return cls(q=None, weights=tuple(float(p) for p in pmf))

    @property
    def is_geometric(self) -> bool:
        return self.weights is None

    @property
    def support_max(self) -> int | None:
        """Largest level with positive mass, None for the (unbounded) geometric case."""
        return None if self.weights is None else len(self.weights)

    def pmf(self, k: int) -> float:
        """mu(k); zero outside the support."""
        if k < 1:
            return 0.0
        if self.weights is None:
            return self.q * (1.0 - self.q) ** (k - 1)
        return self.weights[k - 1] if k <= len(self.weights) else 0.0

    def tail(self, k: int) -> float:
        """P[K > k]."""
        if k < 1:
            return 1.0
        if self.weights is None:
            return (1.0 - self.q) ** k
        return max(0.0, 1.0 - math.fsum(self.weights[:k]))


@dataclass(frozen=True)
class LevelDraw:
    """
    A sampled level K with its span tau(K) and the span of the previous level tau(K-1).

    ``truncated`` is None until the draw has been compared against a truncation bound T.
    """
    level: int
    tau_k: float
    tau_prev: float
    truncated: bool | None = None

    @property
    def span(self) -> int:
        return math.floor(self.tau_k)


def tau(dist: LevelDistribution, k: int) -> float:
    """Span of level k: tau(0) = max(1, 1/(2 mu(1))) and tau(k) = 1/mu(k) for k >= 1.

    Args:
        dist (LevelDistribution): level distribution
        k (int): level, 0 <= k (<= m for a finite pmf)

    Raises:
        DomainError: k outside {0} and the support of mu
    """
    if k < 0 or (dist.support_max is not None and k > dist.support_max):
        raise DomainError(f"level {k} outside the support of the level distribution")
    if k == 0:
        return max(1.0, 1.0 / (2.0 * dist.pmf(1)))
    return 1.0 / dist.pmf(k)


def max_level(dist: LevelDistribution, T: float) -> int:
    """Largest level k with floor(tau(k)) <= T.

    For geometric(1/2) this is floor(log2 T).

    Raises:
        ConfigurationError: T < floor(tau(1)), no level fits under the truncation bound
    """
    if T < math.floor(tau(dist, 1)):
        raise ConfigurationError(f"truncation bound T={T} is below floor(tau(1))={math.floor(tau(dist, 1))}")

    top = dist.support_max or MAX_SEARCH_LEVEL
    k = 1
    while k < top and math.floor(tau(dist, k + 1)) <= T:
        k += 1
    return k


def sample_level(dist: LevelDistribution, stream: RngStream) -> LevelDraw:
    """Draw K ~ mu. The returned draw has not been checked against any T."""
    if dist.is_geometric:
        k = int(stream.geometric(dist.q))
    else:
        k = int(stream.choice(len(dist.weights), p=np.asarray(dist.weights))) + 1
    return LevelDraw(level=k, tau_k=tau(dist, k), tau_prev=tau(dist, k - 1))


def sample_levels(dist: LevelDistribution, stream: RngStream, size: int) -> np.ndarray:
    """Vectorized K ~ mu, ``size`` independent draws."""
    if dist.is_geometric:
        return np.asarray(stream.geometric(dist.q, size), dtype=np.int64)
    return np.asarray(stream.choice(len(dist.weights), p=np.asarray(dist.weights), size=size), dtype=np.int64) + 1


def draw_level(dist: LevelDistribution, stream: RngStream, T: float) -> LevelDraw:
    """Sample a level and flag it as truncated when floor(tau(K)) > T."""
    draw = sample_level(dist, stream)
    return LevelDraw(draw.level, draw.tau_k, draw.tau_prev, truncated=draw.span > T)


def level_draw(dist: LevelDistribution, k: int, T: float) -> LevelDraw:
    """The LevelDraw for a known level k (used when levels were sampled in bulk)."""
    t = tau(dist, k)
    return LevelDraw(k, t, tau(dist, k - 1), truncated=math.floor(t) > T)


def used_length(dist: LevelDistribution, draw: LevelDraw | int, T: float) -> int:
    """Number of chain states the estimator reads: floor(tau(K)) when floor(tau(K)) <= T, else 1."""
    span = math.floor(tau(dist, draw)) if isinstance(draw, (int, np.integer)) else draw.span
    return span if span <= T else 1


def expected_cost(dist: LevelDistribution, T: float) -> float:
    """Exact expected number of chain states consumed by one estimate at truncation bound T.

    sum_{k <= kmax} mu(k) floor(tau(k)) + P[K > kmax], with kmax = max_level(dist, T).
    """
    top = max_level(dist, T)
    head = math.fsum(dist.pmf(k) * math.floor(tau(dist, k)) for k in range(1, top + 1))
    return head + dist.tail(top)
