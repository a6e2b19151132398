import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pdmvote import dataio
from pdmvote.errors import KTooLarge, TooFewMinority, UnknownCategory
from pdmvote.preprocess import (
    EncodedMatrix,
    ScalerParams,
    SmoteConfig,
    apply_minmax,
    encode_dataset,
    encode_type,
    fit_minmax,
    interpolate,
    inverse_minmax,
    minority_neighbor_table,
    nearest_neighbors,
    read_encoded_csv,
    smote_oversample,
    write_encoded_csv,
)


# -- scaling ------------------------------------------------------------------

def test_fit_minmax_column():
    p = fit_minmax([295.3, 304.5, 300.0])
    assert (p.mins[0], p.maxs[0]) == (295.3, 304.5)


def test_single_row_flags_constant_columns():
    with pytest.warns(UserWarning, match="constant"):
        p = fit_minmax([[1.0, 2.0, 3.0]])
    assert p.constant_columns == (0, 1, 2)
    assert np.array_equal(apply_minmax([[1.0, 2.0, 3.0]], p), [[0.0, 0.0, 0.0]])


def test_endpoints_and_midpoint():
    p = ScalerParams(np.array([2.0]), np.array([6.0]))
    assert apply_minmax([[2.0], [6.0], [4.0]], p).ravel().tolist() == [0.0, 1.0, 0.5]


def test_unseen_values_may_leave_unit_interval():
    p = ScalerParams(np.array([0.0]), np.array([1.0]))
    assert apply_minmax([[2.0]], p)[0, 0] == 2.0


def test_column_count_mismatch():
    with pytest.raises(ValueError):
        apply_minmax(np.ones((2, 3)), ScalerParams(np.zeros(2), np.ones(2)))


def test_machine_zero_matches_published_row(excerpt_raw_path, excerpt_encoded, canonical_params):
    ds = dataio.load_csv(excerpt_raw_path)
    em = encode_dataset(ds, canonical_params)
    assert np.allclose(em.X[0], [2, 0.304347826, 0.358024691, 0.222933644, 0.535714286, 0], atol=1e-6)
    _, published, labels = excerpt_encoded
    assert np.abs(em.X - published).max() < 1e-6
    assert np.array_equal(em.y, labels)


def test_air_temperature_extremes_give_published_f2(canonical_params):
    scaled = apply_minmax([[298.1, 308.6, 1551, 42.8, 0]], canonical_params)
    assert abs(scaled[0, 0] - 0.304347826) < 1e-9


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, (12, 3), elements=st.floats(-1e4, 1e4)))
def test_scaling_monotone_and_invertible(m):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = fit_minmax(m)
    s = apply_minmax(m, p)
    for j in range(3):
        if j in p.constant_columns:
            continue
        order = np.argsort(m[:, j], kind="stable")
        assert np.all(np.diff(s[order, j]) >= 0)
        back = inverse_minmax(s, p)[:, j]
        assert np.allclose(back, m[:, j], rtol=1e-9, atol=1e-9 * np.abs(m[:, j]).max())
    assert s.min() >= 0 and s.max() <= 1


def test_scaler_dict_round_trip():
    p = ScalerParams(np.array([1.5, 2.0]), np.array([3.0, 9.25]))
    q = ScalerParams.from_dict(p.to_dict())
    assert np.array_equal(p.mins, q.mins) and np.array_equal(p.maxs, q.maxs)


# -- encoding -------------------------------------------------------------------

@pytest.mark.parametrize("code, value", [("L", 1), ("M", 2), ("H", 0)])
def test_encode_type(code, value):
    assert encode_type(code) == value


@pytest.mark.parametrize("code", ["Q", "l", "", None])
def test_encode_type_rejects(code):
    with pytest.raises(UnknownCategory):
        encode_type(code)


def test_encoded_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    em = EncodedMatrix(np.column_stack([rng.integers(0, 3, 20), rng.random((20, 5))]), rng.integers(0, 2, 20))
    path = tmp_path / "enc.csv"
    write_encoded_csv(em, path)
    assert path.read_text().splitlines()[0] == "F1,F2,F3,F4,F5,F6,label"
    back = read_encoded_csv(path)
    assert np.array_equal(back.X, em.X) and np.array_equal(back.y, em.y)


# -- neighbours -----------------------------------------------------------------

def test_neighbors_on_a_line():
    X = np.array([[0.0], [1.0], [2.0]])
    assert nearest_neighbors(X, 0, 1).tolist() == [1]


def test_neighbors_tie_goes_to_lower_index():
    X = np.array([[0.0], [1.0], [-1.0]])
    assert nearest_neighbors(X, 0, 1).tolist() == [1]
    X = np.array([[5.0], [-1.0], [0.0], [1.0]])
    assert nearest_neighbors(X, 2, 2).tolist() == [1, 3]


def test_neighbors_k_too_large():
    with pytest.raises(KTooLarge):
        nearest_neighbors(np.zeros((3, 2)), 0, 3)


@pytest.mark.parametrize("seed", range(20))
def test_neighbors_match_exhaustive_sort(seed):
    rng = np.random.default_rng(seed)
    X = rng.random((10, 6))
    q = int(rng.integers(10))
    dist = [(float(np.sum((X[i] - X[q]) ** 2)), i) for i in range(10) if i != q]
    expected = [i for _, i in sorted(dist)[:3]]
    assert nearest_neighbors(X, q, 3).tolist() == expected


def test_neighbor_table_matches_single_queries():
    rng = np.random.default_rng(1)
    X = rng.integers(0, 3, size=(40, 2)).astype(float)  # many exact ties
    table = minority_neighbor_table(X, 4, chunk=7)
    for q in range(40):
        assert table[q].tolist() == nearest_neighbors(X, q, 4).tolist()


# -- SMOTE ----------------------------------------------------------------------

def imbalanced(n_pos, n_neg, seed=0, d=6):
    rng = np.random.default_rng(seed)
    X = rng.random((n_pos + n_neg, d))
    X[:, 0] = rng.integers(0, 3, n_pos + n_neg)
    y = np.r_[np.ones(n_pos, int), np.zeros(n_neg, int)]
    return EncodedMatrix(X, y)


def test_interpolation_endpoints():
    a, b = np.array([1.0, 2.0]), np.array([3.0, -2.0])
    assert np.array_equal(interpolate(a, b, 0.0), a)
    assert np.array_equal(interpolate(a, b, 1.0), b)
    assert np.array_equal(interpolate([0.0, 0.0], [1.0, 1.0], 0.5), [0.5, 0.5])


def test_two_point_midpoint_via_smote():
    em = EncodedMatrix(np.array([[0.0, 0.0], [1.0, 1.0], [5, 5], [6, 6], [7, 7]]), np.array([1, 1, 0, 0, 0]))
    out, draw = smote_oversample(em, SmoteConfig(k_neighbors=1, seed=0, integer_columns=()), return_draw=True)
    b, d = draw.base[0], draw.delta[0]
    expected = d if b == 0 else 1.0 - d  # walking from (0,0) or from (1,1)
    assert np.array_equal(out.X[5], [expected, expected])


def test_worked_split_counts():
    out = smote_oversample(imbalanced(240, 6760), SmoteConfig(seed=42))
    assert out.class_counts() == {0: 6760, 1: 6760}
    assert len(out) == 13520
    assert out.n_original == 7000


def test_originals_first_and_verbatim():
    em = imbalanced(30, 200)
    out = smote_oversample(em)
    assert np.array_equal(out.X[:230], em.X) and np.array_equal(out.y[:230], em.y)
    assert np.all(out.y[230:] == 1)


def test_synthetic_rows_lie_on_segments():
    em = imbalanced(25, 300, seed=3)
    out, draw = smote_oversample(em, SmoteConfig(seed=9), return_draw=True)
    Xm = em.X[em.y == 1]
    synth = out.X[len(em):]
    base, nbr = Xm[draw.base], Xm[draw.neighbor]
    lo, hi = np.minimum(base, nbr), np.maximum(base, nbr)
    cont = slice(1, None)
    assert np.all(synth[:, cont] >= lo[:, cont] - 1e-12) and np.all(synth[:, cont] <= hi[:, cont] + 1e-12)
    assert np.allclose(synth[:, cont], interpolate(base, nbr, draw.delta)[:, cont], atol=0)
    # F1 is rounded to the nearer endpoint code and stays in {0, 1, 2}
    assert set(np.unique(synth[:, 0])) <= {0.0, 1.0, 2.0}
    assert np.all(synth[:, 0] >= lo[:, 0]) and np.all(synth[:, 0] <= hi[:, 0])
    assert np.all((draw.delta >= 0) & (draw.delta < 1))
    table = minority_neighbor_table(Xm, 5)
    assert all(n in table[b] for b, n in zip(draw.base, draw.neighbor))


def test_smote_deterministic():
    em = imbalanced(20, 120, seed=5)
    a = smote_oversample(em, SmoteConfig(seed=1))
    b = smote_oversample(em, SmoteConfig(seed=1))
    c = smote_oversample(em, SmoteConfig(seed=2))
    assert np.array_equal(a.X, b.X)
    assert not np.array_equal(a.X, c.X)


def test_smote_balanced_input_unchanged():
    em = imbalanced(10, 10)
    out = smote_oversample(em)
    assert np.array_equal(out.X, em.X)


def test_smote_minority_label_zero():
    em = imbalanced(100, 12)
    out = smote_oversample(em)
    assert out.class_counts() == {0: 100, 1: 100}


def test_too_few_minority():
    with pytest.raises(TooFewMinority):
        smote_oversample(imbalanced(5, 50), SmoteConfig(k_neighbors=5))
    with pytest.raises(TooFewMinority):
        smote_oversample(imbalanced(0, 50))


@settings(max_examples=40, deadline=None)
@given(n_pos=st.integers(6, 40), n_neg=st.integers(41, 150), seed=st.integers(0, 2**32))
def test_smote_count_property(n_pos, n_neg, seed):
    em = imbalanced(n_pos, n_neg, seed=seed % 1000)
    out = smote_oversample(em, SmoteConfig(seed=seed))
    assert len(out) - len(em) == n_neg - n_pos
    assert out.class_counts() == {0: n_neg, 1: n_neg}
