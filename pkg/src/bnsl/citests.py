"""Conditional independence tests with per-engine test counters.

Three engines share one interface: the discrete mutual-information test
(G^2, asymptotically chi-squared), the exact Student's t test for partial
correlation, and a d-separation oracle for validating learners on known
graphs. Every executed test increments the engine's counter exactly once;
results are never cached across calls.

Degenerate cases are resolved conservatively: a test with zero degrees of
freedom (or a t test with a non-positive sample-size margin) returns
independence with p = 1, since a vacuous test carries no evidence of
dependence. A singular correlation submatrix gets a fixed 1e-12 diagonal
ridge before inversion and the outcome is flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .data import ContinuousDataset, Dataset, DiscreteDataset
from .graph import Dag, d_separated

RIDGE = 1e-12


@dataclass(frozen=True)
class TestOutcome:
    """Result of one conditional independence test."""

    statistic: float
    dof: float
    p_value: float
    independent: bool
    degenerate: bool = False
    ridged: bool = False

    def ranking_key(self, name: str) -> tuple:
        """Sort key for association ranking: strongest association first.

        Smaller p wins; ties broken by larger statistic magnitude, then by
        canonical variable name.
        """
        return (self.p_value, -abs(self.statistic), name)


class TestCounter:
    """Monotone count of tests executed by one engine instance."""

    def __init__(self) -> None:
        self.count = 0

    def increment(self) -> None:
        self.count += 1

    def reset(self) -> None:
        self.count = 0

    def __repr__(self):
        return f"TestCounter({self.count})"


def mi_test(data: DiscreteDataset, x: str, y: str, z: frozenset | set | tuple, alpha: float) -> TestOutcome:
    """G^2 mutual-information test of ``x`` against ``y`` given ``z``.

    statistic = 2 * sum O * ln(O / E) with expected counts computed per
    stratum of ``z``; cells with O = 0 contribute nothing. Degrees of
    freedom use the declared level counts: (|x|-1)(|y|-1) * prod |z_k|;
    empty strata still count toward the dof (pure asymptotic formula).
    """
    _check_args(data, x, y, z)
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    # Name-canonical roles and stratum order make the statistic bit-identical
    # under (x, y) swaps and column permutations of the dataset.
    if y < x:
        x, y = y, x
    zs = sorted(z)
    cx = data.cardinality(x)
    cy = data.cardinality(y)
    dof = (cx - 1) * (cy - 1)
    for v in zs:
        dof *= data.cardinality(v)
    if dof <= 0:
        return TestOutcome(0.0, 0, 1.0, independent=True, degenerate=True)

    strata = np.zeros(data.n, dtype=np.int64)
    n_strata = 1
    for v in zs:
        strata = strata * data.cardinality(v) + data.column(v)
        n_strata *= data.cardinality(v)
    flat = (strata * cx + data.column(x)) * cy + data.column(y)
    cube = np.bincount(flat, minlength=n_strata * cx * cy).reshape(n_strata, cx, cy)

    totals = cube.sum(axis=(1, 2), keepdims=True)
    row_sums = cube.sum(axis=2, keepdims=True)
    col_sums = cube.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = cube * np.log(cube * totals / (row_sums * col_sums))
    statistic = 2.0 * float(terms[cube > 0].sum())
    statistic = max(statistic, 0.0)
    p_value = float(special.chdtrc(dof, statistic))
    return TestOutcome(statistic, dof, p_value, independent=p_value > alpha)


def cor_test(
    data: ContinuousDataset,
    x: str,
    y: str,
    z: frozenset | set | tuple,
    alpha: float,
    corr: np.ndarray | None = None,
) -> TestOutcome:
    """Exact Student's t test for the partial correlation of ``x`` and ``y``.

    The partial correlation is read off the inverse of the correlation
    submatrix over {x, y} union z; t = r * sqrt((n - |z| - 2) / (1 - r^2))
    with n - |z| - 2 degrees of freedom, two-sided p-value.

    ``corr`` optionally supplies a precomputed full correlation matrix in
    dataset column order (used by the engine to avoid rebuilding it).
    """
    _check_args(data, x, y, z)
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    if y < x:
        x, y = y, x
    zs = sorted(z)
    dof = data.n - len(zs) - 2
    if dof <= 0:
        return TestOutcome(0.0, max(dof, 0), 1.0, independent=True, degenerate=True)

    if corr is None:
        corr = correlation_matrix(data.values)
    r, ridged = _partial_correlation(data, corr, x, y, zs)
    r = min(max(r, -1.0), 1.0)
    # Exactly collinear pairs land within rounding error of |r| = 1.
    if abs(r) >= 1.0 - 1e-12:
        statistic = math.copysign(math.inf, r)
        return TestOutcome(statistic, dof, 0.0, independent=False, ridged=ridged)
    t = r * math.sqrt(dof / (1.0 - r * r))
    p_value = float(2.0 * special.stdtr(dof, -abs(t)))
    return TestOutcome(t, dof, p_value, independent=p_value > alpha, ridged=ridged)


def _partial_correlation(data, corr, x, y, zs) -> tuple[float, bool]:
    """Partial correlation of (x, y) given ``zs`` from a correlation matrix.

    Conditioning sets of size 0 and 1 use the closed forms; larger sets
    invert the correlation submatrix over {x, y} union zs, applying the
    diagonal ridge if the submatrix is singular.
    """
    ix = data.column_index(x)
    iy = data.column_index(y)
    if not zs:
        return float(corr[ix, iy]), False
    if len(zs) == 1:
        iz = data.column_index(zs[0])
        rxy, rxz, ryz = corr[ix, iy], corr[ix, iz], corr[iy, iz]
        denom = (1.0 - rxz * rxz) * (1.0 - ryz * ryz)
        if denom > 0:
            return float((rxy - rxz * ryz) / math.sqrt(denom)), False
    names = sorted([x, y, *zs])
    idx = [data.column_index(v) for v in names]
    sub = corr[np.ix_(idx, idx)]
    ridged = False
    try:
        omega = np.linalg.inv(sub)
        if not np.all(np.isfinite(omega)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        omega = np.linalg.inv(sub + RIDGE * np.eye(len(names)))
        ridged = True
    a = names.index(x)
    b = names.index(y)
    denom = omega[a, a] * omega[b, b]
    r = -omega[a, b] / math.sqrt(denom) if denom > 0 else 0.0
    return float(r), ridged


def oracle_test(dag: Dag, x: str, y: str, z: frozenset | set | tuple) -> TestOutcome:
    """Perfect test: independence is d-separation in the true graph."""
    if d_separated(dag, x, y, set(z)):
        return TestOutcome(0.0, 0, 1.0, independent=True)
    return TestOutcome(math.inf, 0, 0.0, independent=False)


def correlation_matrix(values: np.ndarray) -> np.ndarray:
    """Pearson correlation matrix with non-finite entries neutralised.

    Constant columns produce undefined correlations; they are replaced with
    zero off the diagonal (and one on it) so learning stays defined on
    degenerate data.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.corrcoef(values, rowvar=False)
    corr = np.atleast_2d(corr)
    bad = ~np.isfinite(corr)
    if bad.any():
        corr[bad] = 0.0
        np.fill_diagonal(corr, 1.0)
    return corr


def _check_args(data: Dataset, x: str, y: str, z) -> None:
    data.column_index(x)
    data.column_index(y)
    for v in z:
        data.column_index(v)
    if x == y:
        raise ValueError("x and y must differ")
    if x in z or y in z:
        raise ValueError("x and y must not appear in the conditioning set")


class MutualInfoTest:
    """Engine wrapper for :func:`mi_test` over one discrete dataset."""

    name = "mi"

    def __init__(self, data: DiscreteDataset, alpha: float):
        if not isinstance(data, DiscreteDataset):
            raise ValueError("the mutual information test requires discrete data")
        self.data = data
        self.alpha = alpha
        self.counter = TestCounter()

    def test(self, x: str, y: str, z) -> TestOutcome:
        outcome = mi_test(self.data, x, y, z, self.alpha)
        self.counter.increment()
        return outcome

    def spawn(self) -> "MutualInfoTest":
        """Fresh engine over the same data with a zeroed private counter."""
        return MutualInfoTest(self.data, self.alpha)


class PartialCorrelationTest:
    """Engine wrapper for :func:`cor_test` over one continuous dataset.

    The full correlation matrix is computed once at construction; each test
    inverts only the small submatrix it needs.
    """

    name = "cor"

    def __init__(self, data: ContinuousDataset, alpha: float, _corr: np.ndarray | None = None):
        if not isinstance(data, ContinuousDataset):
            raise ValueError("the correlation test requires continuous data")
        self.data = data
        self.alpha = alpha
        self.corr = correlation_matrix(data.values) if _corr is None else _corr
        self.counter = TestCounter()

    def test(self, x: str, y: str, z) -> TestOutcome:
        outcome = cor_test(self.data, x, y, z, self.alpha, corr=self.corr)
        self.counter.increment()
        return outcome

    def spawn(self) -> "PartialCorrelationTest":
        return PartialCorrelationTest(self.data, self.alpha, _corr=self.corr)


class OracleTest:
    """Engine wrapper for :func:`oracle_test` against a known true DAG."""

    name = "oracle"

    def __init__(self, dag: Dag, alpha: float = 0.01):
        self.dag = dag
        self.alpha = alpha
        self.counter = TestCounter()

    def test(self, x: str, y: str, z) -> TestOutcome:
        outcome = oracle_test(self.dag, x, y, z)
        self.counter.increment()
        return outcome

    def spawn(self) -> "OracleTest":
        return OracleTest(self.dag, self.alpha)


CiTest = MutualInfoTest | PartialCorrelationTest | OracleTest


def make_engine(test: str, data: Dataset | None, alpha: float, truth: Dag | None = None) -> CiTest:
    """Build a test engine by name: ``mi``, ``cor`` or ``oracle``."""
    if test == "mi":
        if data is None:
            raise ValueError("the mi test requires a dataset")
        return MutualInfoTest(data, alpha)
    if test == "cor":
        if data is None:
            raise ValueError("the cor test requires a dataset")
        return PartialCorrelationTest(data, alpha)
    if test == "oracle":
        if truth is None:
            raise ValueError("the oracle test requires the true graph")
        return OracleTest(truth, alpha)
    raise ValueError(f"unknown test: {test!r}")
