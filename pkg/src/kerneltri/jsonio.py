"""Canonical JSON emission and operator/space descriptors.

Output is byte-stable: keys sorted, reals printed with 17 significant
digits, complex numbers as [re, im] pairs.
"""

from __future__ import annotations

import json
import math
import re
from typing import Any

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .operators import (
    FiniteRankOperator,
    Operator,
    densify,
    kernel_operator,
    ones_kernel,
    sharpness_example,
    volterra_linear,
)
from .spaces import MeasureSpace, build_space


def _format_real(x: float) -> str:
    if not math.isfinite(x):
        raise PreconditionError("cannot serialize non-finite number")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def canonical_dumps(obj: Any) -> str:
    """Deterministic JSON text; identical inputs give identical bytes."""
    out: list[str] = []

    def emit(node: Any):
        if node is None:
            out.append("null")
        elif isinstance(node, bool):
            out.append("true" if node else "false")
        elif isinstance(node, (int, np.integer)):
            out.append(str(int(node)))
        elif isinstance(node, (float, np.floating)):
            out.append(_format_real(float(node)))
        elif isinstance(node, complex):
            emit([node.real, node.imag])
        elif isinstance(node, str):
            out.append(json.dumps(node))
        elif isinstance(node, (list, tuple)):
            out.append("[")
            for i, item in enumerate(node):
                if i:
                    out.append(",")
                emit(item)
            out.append("]")
        elif isinstance(node, dict):
            out.append("{")
            for i, key in enumerate(sorted(node)):
                if i:
                    out.append(",")
                out.append(json.dumps(str(key)) + ":")
                emit(node[key])
            out.append("}")
        else:
            raise PreconditionError(f"cannot serialize {type(node).__name__}")

    emit(obj)
    out.append("\n")
    return "".join(out)


def space_to_dict(space: MeasureSpace) -> dict:
    return {"cells": space.num_cells, "atoms": list(space.atom_ids)}


def space_from_dict(data: dict) -> MeasureSpace:
    return build_space(int(data.get("cells", 0)), [int(a) for a in data.get("atoms", [])])


def _complex_matrix(rows, expect_cols: int | None = None) -> np.ndarray:
    def scalar(v) -> complex:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise PreconditionError("complex entries must be [re, im] pairs")
            return complex(float(v[0]), float(v[1]))
        return complex(float(v))

    mat = np.array([[scalar(v) for v in row] for row in rows], dtype=complex)
    if mat.ndim != 2 or (expect_cols is not None and mat.shape[1] != expect_cols):
        raise DimensionMismatchError("matrix shape mismatch")
    return mat


_NAMED_WITH_INDEX = re.compile(r"^paper_example_(\d+)$")


def named_operator(name: str, **params) -> Operator:
    """Built-in operators so checks need no external data files."""
    m = _NAMED_WITH_INDEX.match(name)
    if m:
        return sharpness_example(int(m.group(1)))
    if name == "paper_example":
        return sharpness_example(int(params["n"]))
    if name == "volterra_linear":
        return volterra_linear(int(params.get("cells", 64)))
    if name == "ones_kernel":
        return ones_kernel(int(params.get("cells", 64)))
    raise PreconditionError(f"unknown named operator: {name!r}")


def operator_from_dict(data: dict) -> Operator:
    kind = data.get("kind")
    if kind == "named":
        extra = {k: v for k, v in data.items() if k not in ("kind", "name")}
        return named_operator(str(data["name"]), **extra)
    if kind == "dense":
        space = space_from_dict(data["space"])
        kernel = _complex_matrix(data["kernel"], expect_cols=None)
        if kernel.shape != (space.size, space.size):
            raise DimensionMismatchError(
                f"kernel shape {kernel.shape} does not match {space.size} points"
            )
        return kernel_operator(space, kernel)
    if kind == "finite_rank":
        space = space_from_dict(data["space"])
        F = _complex_matrix(data["F"])
        G = _complex_matrix(data["G"])
        return densify(FiniteRankOperator(space=space, F=F, G=G))
    raise PreconditionError(f"unknown operator kind: {kind!r}")
