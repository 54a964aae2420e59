"""
Statistical Tests
Chi-Quadrat-Tests für die Simulationsdiagnostik, mit festem Bin-Plan im Report.
"""

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Hashable, List, Mapping, Optional, Sequence

import numpy as np
from scipy import stats

logger = logging.getLogger('PadicSpherical.Stats')

P_THRESHOLD = 0.001
MIN_EXPECTED = 5.0


@dataclass
class ChiSquareReport:
    """Outcome of one chi-square test; `bins` records the bin plan actually used."""
    test: str
    statistic: float = 0.0
    p_value: float = 1.0
    dof: int = 0
    passed: bool = True
    bins: List[str] = field(default_factory=list)
    counts: List[List[int]] = field(default_factory=list)
    note: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _label(key: Hashable) -> str:
    return str(key)


def merge_sparse_bins(rows: Sequence[Mapping[Hashable, int]],
                      min_expected: float = MIN_EXPECTED) -> List[List[Hashable]]:
    """
    Bin plan for a contingency table: categories whose expected cell count falls
    below min_expected in some row are pooled, in sorted order, until every
    pooled bin is large enough.
    """
    totals = Counter()
    for row in rows:
        totals.update(row)
    grand = sum(totals.values())
    if grand == 0:
        return []
    smallest_row = min(sum(row.values()) for row in rows)
    groups: List[List[Hashable]] = []
    pending: List[Hashable] = []
    pending_total = 0
    for key in sorted(totals, key=_label):
        pending.append(key)
        pending_total += totals[key]
        if pending_total * smallest_row / grand >= min_expected:
            groups.append(pending)
            pending, pending_total = [], 0
    if pending:
        if groups:
            groups[-1].extend(pending)
        else:
            groups.append(pending)
    return groups


def contingency_test(rows: Sequence[Mapping[Hashable, int]], name: str,
                     threshold: float = P_THRESHOLD,
                     min_expected: float = MIN_EXPECTED) -> ChiSquareReport:
    """Homogeneity of several count vectors (two-sample chi-square for two rows)."""
    rows = [row for row in rows if sum(row.values()) > 0]
    if len(rows) < 2:
        return ChiSquareReport(name, note="fewer than two nonempty samples")
    groups = merge_sparse_bins(rows, min_expected)
    table = np.array([[sum(row.get(k, 0) for k in group) for group in groups] for row in rows])
    labels = ['+'.join(_label(k) for k in group) for group in groups]
    if table.shape[1] < 2:
        return ChiSquareReport(name, bins=labels, counts=table.tolist(),
                               note="single bin after merging; test is degenerate")
    statistic, p_value, dof, _ = stats.chi2_contingency(table)
    report = ChiSquareReport(name, float(statistic), float(p_value), int(dof),
                             bool(p_value > threshold), labels, table.tolist())
    logger.debug(f"{name}: chi2={statistic:.3f} dof={dof} p={p_value:.4g}")
    return report


def uniformity_test(counts: Mapping[Hashable, int], categories: Sequence[Hashable],
                    name: str, threshold: float = P_THRESHOLD) -> ChiSquareReport:
    """Goodness of fit against the uniform law on the given categories."""
    observed = np.array([counts.get(c, 0) for c in categories])
    extra = sum(v for k, v in counts.items() if k not in set(categories))
    if extra:
        return ChiSquareReport(name, passed=False, p_value=0.0,
                               error=f"{extra} samples outside the category list")
    if observed.sum() == 0:
        return ChiSquareReport(name, note="no samples")
    statistic, p_value = stats.chisquare(observed)
    return ChiSquareReport(name, float(statistic), float(p_value), len(categories) - 1,
                           bool(p_value > threshold), [_label(c) for c in categories],
                           [observed.tolist()])


def independence_test(pairs: Sequence[tuple], name: str,
                      threshold: float = P_THRESHOLD,
                      min_expected: float = MIN_EXPECTED) -> ChiSquareReport:
    """Independence of the two components of sampled pairs."""
    rows: Dict[Hashable, Counter] = {}
    for a, b in pairs:
        rows.setdefault(a, Counter())[b] += 1
    ordered = [rows[k] for k in sorted(rows, key=_label)]
    # pool sparse rows so each row has enough mass
    pooled: List[Counter] = []
    current = Counter()
    columns = {b for _, b in pairs}
    for row in ordered:
        current.update(row)
        if sum(current.values()) >= min_expected * len(columns):
            pooled.append(current)
            current = Counter()
    if current:
        if pooled:
            pooled[-1].update(current)
        else:
            pooled.append(current)
    return contingency_test(pooled, name, threshold, min_expected)


def bonferroni_correct(reports: Sequence[ChiSquareReport],
                       alpha: float = P_THRESHOLD) -> List[ChiSquareReport]:
    """
    Copies of the reports with `passed` judged at alpha / m, m the number of
    non-degenerate tests. The inputs are left unchanged.
    """
    tested = sum(1 for r in reports if r.dof > 0)
    if not tested:
        return list(reports)
    corrected = alpha / tested
    return [replace(r, passed=r.p_value > corrected) if r.dof > 0 else r for r in reports]


def bonferroni(reports: Sequence[ChiSquareReport], alpha: float = P_THRESHOLD) -> bool:
    """All tests pass at the Bonferroni-corrected level alpha / m."""
    corrected = bonferroni_correct(reports, alpha)
    return (all(r.passed for r in corrected if r.dof > 0)
            and all(r.error is None for r in corrected))
