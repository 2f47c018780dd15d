"""JSON and CSV serialization of systems, parameters and orbit traces.

Complex numbers are written as ``[re, im]`` in JSON and as separate ``re``/``im``
columns in CSV. Every float is printed with 17 significant digits, which is
enough for an exact round trip of IEEE doubles.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields
from typing import Any, Iterable, Sequence

import numpy as np

from .fuchsian import FuchsianSystem, RiemannScheme, build_system


class ConfigError(ValueError):
    """Malformed input file or block."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(fmt(z.real)), float(fmt(z.imag))]


def decode_complex(value) -> complex:
    """Accepts ``[re, im]``, a bare number, or a string ``complex()`` can parse."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex pairs have two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"cannot read {value!r} as a complex number") from exc
    raise ConfigError(f"cannot read {value!r} as a complex number")


def encode_matrix(a) -> list:
    return [[encode_complex(v) for v in row] for row in np.asarray(a)]


def decode_matrix(rows) -> np.ndarray:
    try:
        return np.array([[decode_complex(v) for v in row] for row in rows], dtype=complex)
    except TypeError as exc:
        raise ConfigError("matrix rows must be lists") from exc


def system_to_dict(system: FuchsianSystem) -> dict:
    return {
        "matrix_size": system.matrix_size,
        "poles": [encode_complex(u) for u in system.poles],
        "residues": [encode_matrix(a) for a in system.residues],
    }


def system_from_dict(data: dict) -> FuchsianSystem:
    try:
        poles = [decode_complex(u) for u in data["poles"]]
        residues = [decode_matrix(a) for a in data["residues"]]
    except KeyError as exc:
        raise ConfigError(f"system block lacks {exc}") from exc
    size = data.get("matrix_size")
    if size is not None and any(a.shape != (size, size) for a in residues):
        raise ConfigError(f"residues do not match matrix_size {size}")
    return build_system(poles, residues)


def scheme_to_dict(scheme: RiemannScheme) -> dict:
    return {
        "finite": [[encode_complex(v) for v in t] for t in scheme.finite],
        "infinity": [encode_complex(v) for v in scheme.infinity],
        "spectral_type": [list(p) for p in scheme.spectral_type],
    }


def dataclass_to_dict(obj) -> dict:
    return {f.name: encode_complex(getattr(obj, f.name)) for f in fields(obj)}


def dataclass_from_dict(cls, data: dict, names: Sequence[str] | None = None):
    names = list(names) if names is not None else [f.name for f in fields(cls)]
    missing = [n for n in names if n not in data]
    if missing:
        raise ConfigError(f"{cls.__name__} block lacks {', '.join(missing)}")
    return {n: decode_complex(data[n]) for n in names}


def complex_columns(name: str) -> list[str]:
    return [f"{name}_re", f"{name}_im"]


def complex_cells(values: Iterable) -> list[str]:
    out = []
    for v in values:
        z = complex(v)
        out += [fmt(z.real), fmt(z.imag)]
    return out


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def dumps(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"
