"""Read and write operators, states, channels and POVMs as JSON

Every file is an object with a "type" field (operator, density, pure, channel or povm).
Complex entries are [re, im] pairs; matrices are flattened row-major over the product
dimension.
"""

from __future__ import annotations

import json
import logging
import math
import pathlib
from typing import Any, Union

import numpy as np
import numpy.typing as npt

from .divergences import DensityOperator
from .objects import KrausChannel, Povm, PureState
from .operators import SubsystemLayout

__all__ = ["FormatError", "dump", "from_dict", "jsonable", "load", "to_dict"]

FileObject = Union[DensityOperator, PureState, KrausChannel, Povm, np.ndarray]

TYPES = ("operator", "density", "pure", "channel", "povm")

logger = logging.getLogger(__name__)


class FormatError(ValueError):
    """A file does not describe a known object"""

    def __init__(self, message: str, field: str | None = None, position: tuple[int, ...] | None = None):
        self.field = field
        self.position = position
        where = field or ""
        if position is not None:
            where += str(list(position))
        super().__init__(f"{where}: {message}" if where else message)


def jsonable(value: Any) -> Any:
    """Non-finite floats as strings ("inf", "nan"), containers converted recursively"""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def _encode_array(array: npt.ArrayLike) -> list:
    """Row-major [re, im] pairs"""
    a = np.asarray(array, dtype=np.complex128).reshape(-1)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _decode_entry(entry: Any, field: str, position: tuple[int, ...]) -> complex:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if (
        isinstance(entry, (list, tuple))
        and len(entry) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        return complex(entry[0], entry[1])
    raise FormatError(f"expected a number or an [re, im] pair, got {entry!r}", field, position)


def _decode_flat(data: Any, field: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise FormatError("expected a nonempty list of [re, im] pairs", field)
    return np.array([_decode_entry(x, field, (i,)) for i, x in enumerate(data)], dtype=np.complex128)


def _shape(value: Any, field: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(d, int) and d > 0 for d in value):
        raise FormatError(f"expected a list of positive integers, got {value!r}", field)
    return tuple(value)


def _decode_matrix(data: Any, field: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Matrix from row-major entries; a missing shape means square"""
    flat = _decode_flat(data, field)
    if shape is None:
        side = math.isqrt(len(flat))
        if side * side != len(flat):
            raise FormatError(f"{len(flat)} entries do not form a square matrix", field)
        shape = (side, side)
    if len(flat) != shape[0] * shape[1]:
        raise FormatError(
            f"{len(flat)} entries do not fill a {shape[0]} x {shape[1]} matrix", field
        )
    return flat.reshape(shape)


def _layout(data: dict, dim: int) -> SubsystemLayout:
    dims = data.get("dims")
    try:
        if dims is None:
            return SubsystemLayout.from_dims((dim,), data.get("labels"))
        layout = SubsystemLayout.from_dims(_shape(dims, "dims"), data.get("labels"))
        layout.check(dim)
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(str(e), "dims") from e
    return layout


def _square_shape(data: dict, key: str) -> tuple[int, int] | None:
    if key not in data:
        return None
    size = math.prod(_shape(data[key], key)) if isinstance(data[key], list) else data[key]
    if not isinstance(size, int) or size < 1:
        raise FormatError(f"expected a positive integer, got {data[key]!r}", key)
    return (size, size)


def _infer_type(data: dict) -> str:
    if "kraus" in data:
        return "channel"
    if "elements" in data:
        return "povm"
    if "vector" in data:
        return "pure"
    if "matrix" in data:
        return "density"
    raise FormatError("cannot infer the object type", "type")


def to_dict(obj: FileObject) -> dict[str, Any]:
    """JSON-ready dict for a supported object"""
    match obj:
        case DensityOperator():
            return {"type": "density", **obj.layout.asdict(), "matrix": _encode_array(obj.op)}
        case PureState():
            return {"type": "pure", **obj.layout.asdict(), "vector": _encode_array(obj.vector)}
        case KrausChannel():
            return {
                "type": "channel",
                "dim_in": obj.dim_in,
                "dim_out": obj.dim_out,
                "kraus": [_encode_array(k) for k in obj.kraus_ops],
            }
        case Povm():
            return {"type": "povm", "dim": obj.dim, "elements": [_encode_array(e) for e in obj.elements]}
        case np.ndarray():
            return {"type": "operator", "shape": list(obj.shape), "matrix": _encode_array(obj)}
    raise TypeError(f"Object of type {obj.__class__.__name__} is not supported")


def from_dict(data: dict[str, Any]) -> FileObject:
    """Inverse of to_dict; raises FormatError for malformed input"""
    if not isinstance(data, dict):
        raise FormatError(f"expected a JSON object, got {type(data).__name__}")
    kind = data.get("type") or _infer_type(data)
    try:
        match kind:
            case "operator":
                shape = _shape(data["shape"], "shape") if "shape" in data else None
                if shape is not None and len(shape) != 2:
                    raise FormatError(f"expected [rows, cols], got {list(shape)}", "shape")
                return _decode_matrix(data.get("matrix"), "matrix", shape)
            case "density":
                matrix = _decode_matrix(data.get("matrix"), "matrix", _square_shape(data, "dims"))
                return DensityOperator(matrix, _layout(data, matrix.shape[0]))
            case "pure":
                vector = _decode_flat(data.get("vector"), "vector")
                return PureState(vector, _layout(data, vector.shape[0]))
            case "channel":
                kraus = data.get("kraus")
                if not isinstance(kraus, list) or not kraus:
                    raise FormatError("expected a nonempty list of matrices", "kraus")
                shape = None
                if "dim_in" in data or "dim_out" in data:
                    shape = (data.get("dim_out"), data.get("dim_in"))
                    if not all(isinstance(d, int) and d > 0 for d in shape):
                        raise FormatError(f"expected positive dim_out and dim_in, got {shape}", "dim_in")
                return KrausChannel(
                    tuple(_decode_matrix(k, f"kraus[{i}]", shape) for i, k in enumerate(kraus))
                )
            case "povm":
                elements = data.get("elements")
                if not isinstance(elements, list) or not elements:
                    raise FormatError("expected a nonempty list of matrices", "elements")
                shape = _square_shape(data, "dim")
                return Povm(
                    tuple(_decode_matrix(e, f"elements[{i}]", shape) for i, e in enumerate(elements))
                )
    except FormatError:
        raise
    except ValueError as e:
        # state, channel and measurement validation errors are ValueErrors
        raise FormatError(str(e), kind) from e
    raise FormatError(f"unknown type {kind!r}; expected one of {', '.join(TYPES)}", "type")


def dump(obj: FileObject, path: str | pathlib.Path | None = None, indent: int | None = 4) -> str:
    """Serialize obj to JSON, writing it to path when given"""
    text = json.dumps(to_dict(obj), indent=indent)
    if path is not None:
        pathlib.Path(path).write_text(text + "\n")
        logger.debug(f"dump: wrote {path=}")
    return text


def load(path: str | pathlib.Path) -> FileObject:
    path = pathlib.Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON in {path}: {e}") from e
    logger.debug(f"load: read {path=}")
    return from_dict(data)
