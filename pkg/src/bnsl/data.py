"""Column-oriented datasets: discrete (categorical) and continuous (real).

Datasets are immutable after construction; the backing arrays are marked
read-only so they can be shared across workers without copying or locking.
"""

from __future__ import annotations

import numpy as np


class DiscreteDataset:
    """Categorical observations stored as per-variable level indices.

    ``variables`` is an ordered list of ``(name, levels)`` pairs where
    ``levels`` is the ordered list of level labels; ``codes`` is an
    ``(n, m)`` integer array with ``codes[r, j] < len(levels_j)``.
    """

    is_discrete = True

    def __init__(self, variables: list[tuple[str, list[str]]], codes: np.ndarray):
        self.variables = [(str(name), [str(l) for l in levels]) for name, levels in variables]
        names = [name for name, _ in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        codes = np.asarray(codes)
        if codes.ndim != 2 or codes.shape[1] != len(self.variables):
            raise ValueError("codes must be (n, m) with one column per variable")
        if codes.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        if not np.issubdtype(codes.dtype, np.integer):
            raise ValueError("codes must be integers")
        for j, (name, levels) in enumerate(self.variables):
            if not levels:
                raise ValueError(f"variable {name!r} has no levels")
            col = codes[:, j]
            if col.min() < 0 or col.max() >= len(levels):
                raise ValueError(f"out-of-range level index in column {name!r}")
        self.codes = np.ascontiguousarray(codes, dtype=np.int64)
        self.codes.flags.writeable = False
        self._index = {name: j for j, name in enumerate(names)}

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.variables)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    def levels(self, name: str) -> list[str]:
        return self.variables[self.column_index(name)][1]

    def cardinality(self, name: str) -> int:
        return len(self.levels(name))

    def column_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable: {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.codes[:, self.column_index(name)]

    def __repr__(self):
        return f"DiscreteDataset({self.n} rows, {len(self.variables)} variables)"


class ContinuousDataset:
    """Real-valued observations; all cells finite, no missing values."""

    is_discrete = False

    def __init__(self, names: list[str], values: np.ndarray):
        self.names_list = [str(n) for n in names]
        if len(set(self.names_list)) != len(self.names_list):
            raise ValueError("duplicate variable names")
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(self.names_list):
            raise ValueError("values must be (n, m) with one column per variable")
        if values.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        if not np.all(np.isfinite(values)):
            raise ValueError("dataset contains non-finite values")
        self.values = np.ascontiguousarray(values)
        self.values.flags.writeable = False
        self._index = {name: j for j, name in enumerate(self.names_list)}

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.names_list)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable: {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_index(name)]

    def __repr__(self):
        return f"ContinuousDataset({self.n} rows, {len(self.names_list)} variables)"


Dataset = DiscreteDataset | ContinuousDataset


def reverse_columns(data: Dataset) -> Dataset:
    """Same rows with the variable order reversed; an involution."""
    if isinstance(data, DiscreteDataset):
        return DiscreteDataset(list(reversed(data.variables)), data.codes[:, ::-1])
    if isinstance(data, ContinuousDataset):
        return ContinuousDataset(list(reversed(data.names_list)), data.values[:, ::-1])
    raise TypeError(f"not a dataset: {type(data).__name__}")
