"""Random colour lists and reproducible randomness streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "ListAssignment", "list_size", "sample_lists",
           "LISTS", "SPARSE", "DENSE"]

# sub-stream offsets within one trial
LISTS, SPARSE, DENSE = 0, 1, 2


def _ceil(x: float) -> int:
    # absorb float noise so that exact integers are not bumped up
    return math.ceil(x - 1e-9)


@dataclass(frozen=True)
class RngStream:
    """A (master seed, stream id) pair naming one reproducible random stream."""

    master_seed: int
    stream_id: int = 0

    def generator(self, substream: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.master_seed),
                                    spawn_key=(int(self.stream_id), int(substream)))
        return np.random.Generator(np.random.PCG64(ss))


def list_size(n: float, delta: float, D: int | None = None) -> int:
    """``ceil((1 + delta) ln n)``, capped at ``D + 1`` when ``D`` is given."""
    if n < 2:
        raise ValueError("list_size needs n >= 2")
    ell = _ceil((1.0 + delta) * math.log(n))
    if D is not None:
        ell = min(ell, D + 1)
    return max(ell, 0)


@dataclass(frozen=True, eq=False)
class ListAssignment:
    """Per-vertex colour lists drawn from ``range(gamma_size)``.

    ``order[v]`` holds the colours of ``L_v`` in the order they were drawn
    (``order[v, 0]`` is the tentative colour); ``lists`` is the sorted view.
    """

    gamma_size: int
    order: np.ndarray
    seed: int | None = None

    @property
    def ell(self) -> int:
        return self.order.shape[1]

    @property
    def n(self) -> int:
        return self.order.shape[0]

    @property
    def lists(self) -> np.ndarray:
        return np.sort(self.order, axis=1)

    @property
    def tau(self) -> np.ndarray:
        if self.ell == 0:
            raise ValueError("empty lists have no tentative colour")
        return self.order[:, 0]

    def __getitem__(self, v: int) -> np.ndarray:
        return np.sort(self.order[v])

    def prefix(self, ell: int) -> "ListAssignment":
        """The nested sub-assignment made of the first ``ell`` draws of each list."""
        if ell > self.ell:
            raise ValueError(f"prefix {ell} longer than lists of size {self.ell}")
        return ListAssignment(self.gamma_size, self.order[:, :ell], self.seed)

    def restrict(self, n: int) -> "ListAssignment":
        return ListAssignment(self.gamma_size, self.order[:n], self.seed)

    def contains(self, v: int, colour: int) -> bool:
        return bool(np.any(self.order[v] == colour))

    def __eq__(self, other):
        if not isinstance(other, ListAssignment):
            return NotImplemented
        return self.gamma_size == other.gamma_size and np.array_equal(self.order, other.order)

    @classmethod
    def from_lists(cls, lists, gamma_size: int) -> "ListAssignment":
        """Wrap explicit equal-length lists; the first entry of each is its tentative colour."""
        order = np.asarray([list(l) for l in lists], dtype=np.int32)
        if order.ndim == 1:
            order = order.reshape(len(lists), 0)
        if order.size and (order.min() < 0 or order.max() >= gamma_size):
            raise ValueError("colour outside the palette")
        for row in order:
            if len(set(row.tolist())) != len(row):
                raise ValueError("lists must not repeat a colour")
        return cls(gamma_size, order)


def sample_lists(n: int, gamma_size: int, ell: int, rng) -> ListAssignment:
    """Independent uniform ``ell``-subsets of ``range(gamma_size)``, one per vertex.

    Column ``j`` draws, for every vertex, a uniform index among the colours not
    yet in its list (a partial Fisher-Yates shuffle).  Each column consumes
    exactly ``n`` draws, so the first ``ell`` columns do not depend on how many
    more are drawn afterwards: shorter lists are prefixes of longer ones.
    """
    if ell > gamma_size:
        raise ValueError(f"list size {ell} exceeds palette size {gamma_size}")
    if ell < 0:
        raise ValueError("list size must be non-negative")
    seed = None
    if isinstance(rng, RngStream):
        seed = rng.master_seed
        rng = rng.generator(LISTS)
    order = np.empty((n, ell), dtype=np.int32)
    taken = np.empty((n, 0), dtype=np.int64)
    for j in range(ell):
        val = rng.integers(0, gamma_size - j, size=n, dtype=np.int64)
        # map the r-th free colour: walk past taken colours in ascending order
        for k in range(j):
            val += taken[:, k] <= val
        order[:, j] = val
        taken = np.sort(np.column_stack([taken, val]), axis=1)
    return ListAssignment(gamma_size, order, seed)
