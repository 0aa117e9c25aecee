"""Test reading and writing objects as JSON"""

import json
import math

import numpy as np
import pytest

from condrenyi.divergences import DensityOperator
from condrenyi.fileio import FormatError, dump, from_dict, jsonable, load, to_dict
from condrenyi.objects import KrausChannel, Povm, PureState, bell_state, random_channel, random_density

BELL_VECTOR = [[2**-0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [2**-0.5, 0.0]]


def test_pure_state_format():
    """Test a pure state is written as flattened [re, im] pairs with its layout"""
    data = to_dict(bell_state())
    assert data["type"] == "pure"
    assert data["labels"] == ["A", "B"]
    assert data["dims"] == [2, 2]
    np.testing.assert_allclose(np.array(data["vector"]), BELL_VECTOR)


def test_density_row_major():
    """Test matrix entries are flattened row by row"""
    rho = DensityOperator.from_matrix(np.array([[0.5, 0.25j], [-0.25j, 0.5]]))
    data = to_dict(rho)
    assert data["matrix"] == [[0.5, 0.0], [0.0, 0.25], [0.0, -0.25], [0.5, 0.0]]
    assert np.allclose(from_dict(data).op, rho.op)


def test_dump_load(tmp_path, rng):
    """Test each object type survives a file write"""
    path = tmp_path / "object.json"
    rho = random_density((2, 3), None, rng)
    dump(rho, path)
    loaded = load(path)
    assert isinstance(loaded, DensityOperator)
    assert loaded.layout == rho.layout
    assert np.allclose(loaded.op, rho.op)

    channel = random_channel(2, 3, 2, rng)
    dump(channel, path)
    loaded = load(path)
    assert isinstance(loaded, KrausChannel)
    assert (loaded.dim_in, loaded.dim_out) == (2, 3)

    dump(Povm.fourier(3), path)
    loaded = load(path)
    assert isinstance(loaded, Povm)
    assert len(loaded) == 3


def test_operator_type():
    data = {"type": "operator", "shape": [2, 3], "matrix": [1, 2, 3, 4, 5, 6]}
    assert np.array_equal(from_dict(data), np.arange(1, 7).reshape(2, 3))


def test_type_inferred():
    """Test a missing type is inferred from the fields present"""
    data = to_dict(bell_state())
    del data["type"]
    assert isinstance(from_dict(data), PureState)
    data = {"matrix": [0.5, 0, 0, 0.5]}
    assert isinstance(from_dict(data), DensityOperator)


@pytest.mark.parametrize(
    "data,field",
    [
        ({"type": "density", "matrix": [1, 0, 0]}, "matrix"),
        ({"type": "density", "matrix": [1, 0, 0, 1]}, "density"),
        ({"type": "density", "matrix": [[1, 0, 0]]}, "matrix"),
        ({"type": "density", "dims": [2, 3], "matrix": [1, 0, 0, 0]}, "matrix"),
        ({"type": "pure", "vector": []}, "vector"),
        ({"type": "channel", "kraus": []}, "kraus"),
        ({"type": "povm", "elements": [[1, 0, 0, 0]]}, "povm"),
        ({"type": "unicorn"}, "type"),
        ({"labels": ["A"]}, "type"),
    ],
)
def test_malformed(data, field):
    """Test malformed objects raise FormatError naming the field"""
    with pytest.raises(FormatError) as excinfo:
        from_dict(data)
    assert excinfo.value.field == field


def test_malformed_entry_position():
    with pytest.raises(FormatError) as excinfo:
        from_dict({"type": "density", "matrix": [1, 0, "x", 0]})
    assert excinfo.value.position == (2,)


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(FormatError):
        load(path)


def test_unsupported_object():
    with pytest.raises(TypeError):
        to_dict("state")


def test_jsonable():
    """Test non-finite floats become strings"""
    assert jsonable({"a": [math.inf, 1.0], "b": (math.nan,)}) == {"a": ["inf", 1.0], "b": ["nan"]}
    assert json.dumps(jsonable(-math.inf)) == '"-inf"'
