import json

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewner_lab.classifier import Cone, power_set
from loewner_lab.exceptions import InputError
from loewner_lab.io import canonical_json, matrix_from_dict, matrix_to_dict, read_matrix, to_plain, write_json, write_matrix


def test_sorted_keys_and_float_format():
    text = canonical_json({"b": 0.1, "a": 1, "c": [1.0, 2.5]})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.10000000000000001" in text
    assert "[1.0, 2.5]" in text


def test_numpy_values():
    d = json.loads(canonical_json({"x": np.float64(2.0), "n": np.int64(3), "flag": np.bool_(True), "m": np.eye(2)}))
    assert d == {"x": 2.0, "n": 3, "flag": True, "m": [[1.0, 0.0], [0.0, 1.0]]}


def test_non_finite_as_strings():
    d = json.loads(canonical_json({"a": float("inf"), "b": float("nan"), "c": float("-inf")}))
    assert d == {"a": "inf", "b": "nan", "c": "-inf"}


def test_unicode_is_kept():
    assert "ℕ ∪ [3, ∞)" in canonical_json(power_set("positivity", "plain", Cone(5, 2, "nonneg")))


def test_unserialisable():
    with pytest.raises(TypeError):
        canonical_json({"x": object()})


@settings(max_examples=100, deadline=None)
@given(st.recursive(st.floats(allow_nan=False, allow_infinity=False) | st.integers() | st.text(max_size=5) | st.booleans(),
                    lambda c: st.lists(c, max_size=4) | st.dictionaries(st.text(max_size=4), c, max_size=4), max_leaves=15))
def test_roundtrip_and_stability(obj):
    text = canonical_json(obj)
    back = json.loads(text)
    assert back == json.loads(json.dumps(to_plain(obj)))
    assert canonical_json(back) == text


def test_matrix_dict_roundtrip():
    A = np.array([[1.0, 0.5], [0.5, 2.0]])
    npt.assert_array_equal(matrix_from_dict(matrix_to_dict(A)), A)


def test_matrix_dict_shape_mismatch():
    with pytest.raises(InputError):
        matrix_from_dict({"n": 3, "rows": [[1.0, 0.0], [0.0, 1.0]]})
    with pytest.raises(InputError):
        matrix_from_dict({"rows": [[1.0]]})


@pytest.mark.parametrize("suffix", ["csv", "json"])
def test_matrix_file_roundtrip(tmp_path, suffix):
    rng = np.random.default_rng(0)
    G = rng.standard_normal((4, 2))
    A = G @ G.T / 3
    path = write_matrix(tmp_path / f"A.{suffix}", A)
    npt.assert_array_equal(read_matrix(path), A)


def test_csv_rejects_text(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,x\nx,1\n")
    with pytest.raises(InputError):
        read_matrix(path)


def test_write_json_creates_parents(tmp_path):
    path = write_json(tmp_path / "a" / "b.json", {"k": 1})
    assert json.loads(path.read_text()) == {"k": 1}
