"""Deterministic random streams.

Every stochastic routine in the library takes an :class:`RngStream` rather
than a global generator. A stream is identified by (algorithm, seed,
derivation path); identical identities produce identical draw sequences
across runs and platforms. Child streams are derived by index, never by
drawing from the parent, so independent tasks (repetitions, folds, grid
cells) can run in any order or in parallel without changing results.

The bit generator is Philox (counter-based, 64-bit), keyed through
numpy's SeedSequence with the derivation path as spawn key.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ALGORITHM_ID = "philox4x64"


@dataclass(frozen=True)
class RngStream:
    """Identity of a deterministic random stream.

    Args:
        seed: 64-bit base seed shared by the whole pipeline.
        path: tuple of derivation indices leading to this stream.
    """

    seed: int
    path: tuple[int, ...] = field(default_factory=tuple)
    algorithm: str = ALGORITHM_ID

    def child(self, index: int) -> "RngStream":
        return derive_stream(self, index)

    def generator(self) -> np.random.Generator:
        """Fresh numpy Generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))

    def record(self) -> dict:
        """JSON-ready identity, embedded in every output file."""
        return {
            "algorithm_id": self.algorithm,
            "seed": int(self.seed),
            "stream_path": [int(i) for i in self.path],
        }


def derive_stream(base: RngStream, index: int) -> RngStream:
    """Child stream statistically independent of its siblings.

    Deterministic in (base, index); nesting is supported, so
    ``derive_stream(derive_stream(s, 1), 0)`` is itself reproducible.
    """
    if index < 0:
        raise ValueError(f"stream index must be nonnegative, got {index}")
    return RngStream(seed=base.seed, path=base.path + (int(index),),
                     algorithm=base.algorithm)
