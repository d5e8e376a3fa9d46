"""Double-buffered structured-grid arrays.

Every solver sweep reads from the ``current`` buffer and writes to
``next``; `swap` flips the two atomically at the end of a step. That
discipline is what makes the cell-parallel kernels deterministic
regardless of worker count: no sweep ever observes a partially updated
buffer.
"""

from __future__ import annotations

import numpy as np


class FieldError(RuntimeError):
    pass


class Field:
    """A scalar, vector, or population field on a structured grid.

    Storage is row-major float64. ``extents`` is the grid shape
    (nx, ny) or (nx, ny, nz); ``components`` is 1 for scalars, the
    dimension for vectors, or Q for LBM populations. Component is the
    leading axis so each component is contiguous.
    """

    def __init__(self, extents: tuple[int, ...], components: int = 1, fill: float = 0.0):
        if components < 1:
            raise FieldError("components must be >= 1")
        if any(n < 1 for n in extents):
            raise FieldError(f"bad extents {extents}")
        self.extents = tuple(int(n) for n in extents)
        self.components = int(components)
        shape = (self.components, *self.extents) if components > 1 else self.extents
        self._bufs = [np.full(shape, fill, dtype=np.float64),
                      np.full(shape, fill, dtype=np.float64)]

    @property
    def current(self) -> np.ndarray:
        return self._bufs[0]

    @property
    def next(self) -> np.ndarray:
        return self._bufs[1]

    def swap(self) -> None:
        self._bufs.reverse()

    def fill(self, value: float) -> None:
        self._bufs[0][...] = value
        self._bufs[1][...] = value

    def checksum(self) -> float:
        """Order-independent digest of ``current``, for no-mutation asserts."""
        buf = self._bufs[0]
        return float(np.sum(buf)) + float(np.sum(buf * buf))

    def check_finite(self, label: str = "field") -> None:
        buf = self._bufs[0]
        if not np.all(np.isfinite(buf)):
            bad = np.argwhere(~np.isfinite(buf))
            raise FieldError(f"{label}: non-finite value at index "
                             f"{tuple(int(i) for i in bad[0])}")


def require_finite(arr: np.ndarray, label: str) -> None:
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))
        raise FieldError(f"{label}: non-finite value at index "
                         f"{tuple(int(i) for i in bad[0])}")
