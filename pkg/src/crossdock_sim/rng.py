"""Reproducible uniform streams, one per source of model randomness.

Each stream is addressed by a (master seed, source id, replication index)
key and is backed by a counter-based Philox generator, so any stream can
be reconstructed independently without jump-ahead arithmetic.  All
distribution sampling is by inverse transform and consumes exactly one
uniform per sample: that is what keeps alternative configurations
synchronized when they share streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

# Sources of randomness in the crossdock model. "shared" is the
# single-stream mode that mimics simulation software defaults.
SOURCE_IDS = (
    "arrival",
    "order_type",
    "point_choice",
    "manual_service_point_A",
    "manual_service_point_B",
    "auto_service_point_A",
    "auto_service_point_B",
)
SHARED_SOURCE = "shared"

_SOURCE_CODES = {name: i for i, name in enumerate(SOURCE_IDS + (SHARED_SOURCE,))}

_BUFFER = 4096


@dataclass(frozen=True)
class StreamKey:
    """Identity of one random-number stream."""

    master_seed: int
    source_id: str
    replication_index: int

    def __post_init__(self):
        if self.source_id not in _SOURCE_CODES:
            raise ConfigurationError(f"unknown source_id: {self.source_id!r}")
        if self.replication_index < 0:
            raise ConfigurationError("replication_index must be >= 0")


class RandomStream:
    """Buffered uniform stream whose output is a pure function of its key."""

    __slots__ = ("key", "draws_taken", "_gen", "_buf", "_pos")

    def __init__(self, key: StreamKey):
        self.key = key
        self.draws_taken = 0
        ss = np.random.SeedSequence(
            [key.master_seed, _SOURCE_CODES[key.source_id], key.replication_index]
        )
        self._gen = np.random.Generator(np.random.Philox(ss))
        self._buf: list[float] = []
        self._pos = 0

    def uniform(self) -> float:
        """One uniform in [0, 1); increments draws_taken by exactly 1."""
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BUFFER).tolist()
            self._pos = 0
        v = self._buf[self._pos]
        self._pos += 1
        self.draws_taken += 1
        return v


def stream_create(master_seed: int, source_id: str, replication_index: int) -> RandomStream:
    return RandomStream(StreamKey(master_seed, source_id, replication_index))


def derive_master_seed(master_seed: int, *tags: int) -> int:
    """A new 64-bit master seed, deterministically disjoint from the input.

    Used where an experiment needs an independent key space (e.g. the
    no-CRN arm of a paired comparison).
    """
    ss = np.random.SeedSequence([master_seed, *tags])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# --- inverse transforms -------------------------------------------------

def exponential_inverse(u: float, mean: float) -> float:
    """Inverse CDF of the exponential distribution at u."""
    return -mean * math.log1p(-u)


def triangular_inverse(u: float, low: float, mode: float, high: float) -> float:
    """Inverse CDF of the triangular(low, mode, high) distribution at u."""
    span = high - low
    c = (mode - low) / span
    if u <= c:
        return low + math.sqrt(u * span * (mode - low))
    return high - math.sqrt((1.0 - u) * span * (high - mode))


def sample_exponential(stream: RandomStream, mean: float) -> float:
    """Exponential sample by inverse transform; consumes exactly one uniform."""
    if mean <= 0:
        raise ConfigurationError("exponential mean must be > 0")
    return exponential_inverse(stream.uniform(), mean)


def sample_triangular(stream: RandomStream, low: float, mode: float, high: float) -> float:
    """Triangular sample by inverse transform; consumes exactly one uniform."""
    if not (low <= mode <= high) or not low < high:
        raise ConfigurationError(
            f"triangular parameters must satisfy min <= mode <= max and min < max, "
            f"got ({low}, {mode}, {high})"
        )
    return triangular_inverse(stream.uniform(), low, mode, high)


@dataclass(frozen=True)
class DistributionSpec:
    """Serializable description of a sampling distribution.

    kind "exponential" uses `mean`; kind "triangular" uses `low`, `mode`,
    `high`.
    """

    kind: str
    mean: float | None = None
    low: float | None = None
    mode: float | None = None
    high: float | None = None

    def validate(self, field: str) -> list[str]:
        problems = []
        if self.kind == "exponential":
            if self.mean is None or self.mean <= 0:
                problems.append(f"{field}: exponential mean must be > 0")
        elif self.kind == "triangular":
            ok = (
                self.low is not None
                and self.mode is not None
                and self.high is not None
                and self.low <= self.mode <= self.high
                and self.low < self.high
            )
            if not ok:
                problems.append(
                    f"{field}: triangular needs min <= mode <= max with min < max"
                )
        else:
            problems.append(f"{field}: unknown distribution kind {self.kind!r}")
        return problems

    def sample(self, stream: RandomStream) -> float:
        if self.kind == "exponential":
            return sample_exponential(stream, self.mean)
        return sample_triangular(stream, self.low, self.mode, self.high)

    def to_dict(self) -> dict:
        if self.kind == "exponential":
            return {"kind": "exponential", "mean": self.mean}
        return {"kind": "triangular", "min": self.low, "mode": self.mode, "max": self.high}

    @classmethod
    def from_dict(cls, data: dict, field: str) -> "DistributionSpec":
        if not isinstance(data, dict):
            raise ConfigurationError(f"{field}: expected an object")
        kind = data.get("kind")
        if kind == "exponential":
            allowed = {"kind", "mean"}
            spec = cls(kind="exponential", mean=data.get("mean"))
        elif kind == "triangular":
            allowed = {"kind", "min", "mode", "max"}
            spec = cls(
                kind="triangular",
                low=data.get("min"),
                mode=data.get("mode"),
                high=data.get("max"),
            )
        else:
            raise ConfigurationError(f"{field}: unknown distribution kind {kind!r}")
        unknown = set(data) - allowed
        if unknown:
            raise ConfigurationError(
                f"{field}: unknown fields {sorted(unknown)}"
            )
        problems = spec.validate(field)
        if problems:
            raise ConfigurationError("; ".join(problems))
        return spec
