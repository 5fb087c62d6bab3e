import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from thermonet.errors import ContractError, DataError, StageError
from thermonet.netmap import series_to_network
from thermonet.preprocess import baseline, choose_scale, detrend_linear, normalize, pool, prepare
from thermonet.series import Stage, TimeSeries

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("values, expected", [
    ([10, 12, 11], [0, 2, 1]),
    ([7.5, 7.5, 7.5], [0, 0, 0]),
    ([5], [0]),
])
def test_baseline(values, expected):
    out = baseline(TimeSeries(values))
    assert out.values.tolist() == expected and out.stage is Stage.BASELINED


def test_baseline_rejects_later_stage():
    with pytest.raises(StageError):
        baseline(TimeSeries([1.0, 2.0], stage=Stage.DETRENDED))


def test_detrend_exact_line():
    out, rep = detrend_linear(TimeSeries([1, 3, 5, 7]))
    assert np.max(np.abs(out.values)) <= 1e-12
    assert rep.slope == pytest.approx(2) and rep.intercept == pytest.approx(1)


def test_detrend_hand_computed():
    # closed form: t_mean 1.5, y_mean 1.5, Sxy 4, Sxx 5
    out, rep = detrend_linear(TimeSeries([0, 2, 1, 3]))
    assert rep.slope == pytest.approx(0.8, abs=1e-12)
    assert rep.intercept == pytest.approx(0.3, abs=1e-12)
    np.testing.assert_allclose(out.values, [-0.3, 0.9, -0.9, 0.3], atol=1e-12)
    assert out.stage is Stage.DETRENDED


def test_detrend_constant():
    out, rep = detrend_linear(TimeSeries([4.0] * 6))
    assert rep.slope == 0 and np.all(out.values == 0)


def test_detrend_matches_polyfit(rng):
    y = rng.normal(size=300).cumsum() + 1e4
    _, rep = detrend_linear(TimeSeries(y))
    slope, intercept = np.polyfit(np.arange(y.size), y, 1)
    assert rep.slope == pytest.approx(slope, rel=1e-9)
    assert rep.intercept == pytest.approx(intercept, rel=1e-9)


def test_detrend_needs_two_samples():
    with pytest.raises(ContractError):
        detrend_linear(TimeSeries([1.0]))


@given(arrays(np.float64, st.integers(2, 400), elements=finite))
@settings(max_examples=100)
def test_detrend_orthogonality(y):
    out, rep = detrend_linear(TimeSeries(y))
    r = out.values
    tol = 1e-9 * y.size * max(np.max(np.abs(y)), 1.0)
    assert abs(r.sum()) <= tol
    assert abs(np.dot(np.arange(y.size), r)) <= tol * y.size
    assert abs(rep.residual_mean) <= 1e-9 * (np.max(np.abs(y)) + 1)


@given(arrays(np.float64, st.integers(2, 200), elements=finite))
@settings(max_examples=50)
def test_detrend_idempotent(y):
    once, _ = detrend_linear(TimeSeries(y))
    _, rep = detrend_linear(TimeSeries(once.values))
    scale = max(np.max(np.abs(y)), 1.0)
    assert abs(rep.slope) <= 1e-9 * scale and abs(rep.intercept) <= 1e-9 * scale * y.size


@given(arrays(np.float64, st.integers(2, 200), elements=finite))
@settings(max_examples=50)
def test_baseline_then_detrend_equals_detrend(y):
    s = TimeSeries(y)
    a, _ = detrend_linear(s)
    b, _ = detrend_linear(baseline(s))
    np.testing.assert_allclose(a.values, b.values, atol=1e-9 * max(np.max(np.abs(y)), 1.0))


def _detrended(values):
    return TimeSeries(values, stage=Stage.DETRENDED)


def test_normalize_examples():
    assert normalize(_detrended([-1, 1]), 2).values.tolist() == [-0.5, 0.5]
    assert normalize(_detrended([0, 0, 0]), 3.7).values.tolist() == [0, 0, 0]
    for bad in (0, -1, float("nan"), float("inf")):
        with pytest.raises(ContractError):
            normalize(_detrended([1, 2]), bad)


def test_normalize_requires_detrended():
    with pytest.raises(StageError):
        normalize(TimeSeries([1.0, 2.0]), 1.0)


@given(arrays(np.float64, st.integers(20, 200), elements=st.floats(-100, 100)),
       st.floats(1e-3, 1e3))
@settings(max_examples=40)
def test_normalize_does_not_change_network(y, c):
    d = _detrended(y)
    a = normalize(d, 1.0)
    b = normalize(d, c)
    np.testing.assert_allclose(b.values, a.values / c, rtol=1e-15)
    assert series_to_network(a, 10) == series_to_network(b, 10)


def test_choose_scale_modes():
    b = TimeSeries([0.0, 2.0, -2.0], stage=Stage.BASELINED)
    d = TimeSeries([1.0, -1.0, 0.0], stage=Stage.DETRENDED)
    assert choose_scale(b, d, "auto") == pytest.approx(4 / 3)
    assert choose_scale(b, d, "std") == pytest.approx(np.std([1, -1, 0]))
    assert choose_scale(b, d, "none") == 1.0
    zero_b = TimeSeries([0.0, 0.0, 0.0], stage=Stage.BASELINED)
    assert choose_scale(zero_b, d) == pytest.approx(np.std([1, -1, 0]))
    zero_d = TimeSeries([0.0, 0.0, 0.0], stage=Stage.DETRENDED)
    assert choose_scale(zero_b, zero_d) == 1.0
    with pytest.raises(ContractError):
        choose_scale(b, d, "median")


def test_prepare_constant_series_is_all_zero():
    out, _ = prepare(TimeSeries([3.0] * 10))
    assert np.all(out.values == 0) and out.stage is Stage.NORMALIZED


def _norm(values, dt=1.0, label=""):
    return TimeSeries(values, dt=dt, label=label, stage=Stage.NORMALIZED)


def test_pool_concatenates_in_order():
    out = pool([_norm([1, 2, 3], label="A"), _norm([4, 5, 6, 7], label="B")])
    assert out.values.tolist() == [1, 2, 3, 4, 5, 6, 7]
    assert out.stage is Stage.POOLED and out.sources == ("A", "B") and out.label == "A+B"


def test_pool_single():
    out = pool([_norm([1, 2], label="only")])
    assert out.values.tolist() == [1, 2] and out.stage is Stage.POOLED


def test_pool_errors():
    with pytest.raises(ContractError):
        pool([])
    with pytest.raises(DataError):
        pool([_norm([1], dt=1), _norm([2], dt=2)])
    with pytest.raises(StageError):
        pool([TimeSeries([1.0], stage=Stage.DETRENDED)])


def test_pool_tolerates_ulp_dt_difference():
    out = pool([_norm([1], dt=1 / 9), _norm([2], dt=(1 / 9) * (1 + 1e-15))])
    assert len(out) == 2


@given(st.lists(arrays(np.float64, st.integers(1, 30), elements=finite), min_size=1, max_size=6))
@settings(max_examples=50)
def test_pool_preserves_length_and_multiset(chunks):
    out = pool([_norm(c) for c in chunks])
    allv = np.concatenate(chunks)
    assert len(out) == allv.size
    assert np.array_equal(np.sort(out.values), np.sort(allv))


def test_pool_of_36_pairs_structure():
    # one series per eye of 36 subjects
    series = [_norm(np.full(135, i, dtype=float), dt=1 / 9, label=f"s{i // 2}{'LR'[i % 2]}")
              for i in range(72)]
    out = pool(series)
    assert len(out) == 72 * 135 and len(out.sources) == 72
