from collections import Counter

from padic_spherical.stats import (ChiSquareReport, bonferroni, bonferroni_correct,
                                   contingency_test, independence_test, merge_sparse_bins,
                                   uniformity_test)


def test_uniformity_of_exact_counts():
    report = uniformity_test({c: 50 for c in 'abcd'}, list('abcd'), 'flat')
    assert report.passed
    assert report.statistic == 0.0
    assert report.p_value == 1.0
    assert report.dof == 3


def test_uniformity_rejects_skewed_counts():
    report = uniformity_test({'a': 400, 'b': 10, 'c': 10}, list('abc'), 'skewed')
    assert not report.passed


def test_uniformity_reports_samples_outside_categories():
    report = uniformity_test({'a': 5, 'z': 1}, ['a', 'b'], 'extra')
    assert not report.passed
    assert 'outside' in report.error


def test_merge_sparse_bins_covers_every_category_once():
    rows = [Counter({'a': 100, 'b': 1, 'c': 2, 'd': 80}), Counter({'a': 90, 'b': 3, 'd': 70})]
    groups = merge_sparse_bins(rows)
    flat = [k for g in groups for k in g]
    assert sorted(flat) == ['a', 'b', 'c', 'd']
    assert len(flat) == len(set(flat))
    assert any(len(g) > 1 for g in groups)


def test_contingency_identical_rows():
    row = Counter({0: 120, 1: 80, 2: 40})
    report = contingency_test([row, Counter(row)], 'same')
    assert report.passed
    assert report.statistic == 0.0
    assert report.bins == ['0', '1', '2']


def test_contingency_different_rows():
    report = contingency_test([Counter({0: 300, 1: 10}), Counter({0: 10, 1: 300})], 'different')
    assert not report.passed


def test_contingency_degenerate_cases():
    assert contingency_test([Counter({0: 10})], 'one row').note is not None
    report = contingency_test([Counter({0: 10}), Counter({0: 12})], 'one bin')
    assert report.passed
    assert 'single bin' in report.note


def test_independence_of_product_grid():
    pairs = [(a, b) for a in range(3) for b in range(4)] * 25
    report = independence_test(pairs, 'grid')
    assert report.passed
    assert report.statistic == 0.0


def test_independence_detects_dependence():
    pairs = [(a, a) for a in range(3)] * 100
    assert not independence_test(pairs, 'diagonal').passed


def test_bonferroni_corrects_level():
    reports = [ChiSquareReport('a', p_value=0.0004, dof=1), ChiSquareReport('b', p_value=0.5, dof=1)]
    assert not bonferroni(reports, alpha=0.001)
    assert reports[0].passed
    corrected = bonferroni_correct(reports, alpha=0.001)
    assert [r.passed for r in corrected] == [False, True]
    assert corrected[0] is not reports[0]
    reports = [ChiSquareReport('a', p_value=0.002, dof=1)]
    assert bonferroni(reports, alpha=0.001)
    assert bonferroni([ChiSquareReport('skipped')])
