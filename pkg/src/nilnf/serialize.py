"""JSON helpers shared by the CLI and the report objects."""

from __future__ import annotations

from .scalar import RadScalar


def scalar_to_json(x):
    if isinstance(x, float):
        return x
    if isinstance(x, int):
        return RadScalar.coerce(x).to_json()
    return x.to_json()


def scalar_from_json(obj):
    if isinstance(obj, float):
        return obj
    return RadScalar.from_json(obj)
