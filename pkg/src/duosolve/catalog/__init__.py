"""Benchmark problem catalog: 33 cases across one, two, and three
spacetime dimensions, each carrying its collocation defaults, published
timing row, and (where one exists) a closed-form or numerical reference
solution."""
from __future__ import annotations

import re

from .core import (
    BenchmarkCase,
    analytic_jets,
    case_to_json,
    self_consistency,
)
from .refs import PaperResult, reference_for
from . import odes1d, pdes2d, pdes3d

_REGISTRY: dict[str, BenchmarkCase] = {
    c.id: c for c in (*odes1d.cases(), *pdes2d.cases(), *pdes3d.cases())
}

case_ids: tuple[str, ...] = tuple(_REGISTRY)


def _normalize(case_id: str) -> str:
    m = re.fullmatch(r"\s*([b-dB-D])\.?\s*(\d{1,2})\s*", str(case_id))
    if not m:
        raise KeyError(f"unrecognized case id: {case_id!r}")
    return f"{m.group(1).upper()}.{int(m.group(2))}"


def get(case_id: str) -> BenchmarkCase:
    """Look up a case by id; 'B.3', 'b3', and 'b.3' all name the same one."""
    key = _normalize(case_id)
    try:
        return _REGISTRY[key]
    except KeyError:
        raise KeyError(f"no benchmark case {key}; known ids run B.1-B.10, "
                       f"C.1-C.12, D.1-D.11") from None


def list_cases(dimension: int | None = None) -> list[tuple[str, str]]:
    return [(c.id, c.summary) for c in _REGISTRY.values()
            if dimension is None or c.dimension == dimension]


def reference_row(case_id: str) -> dict | None:
    ref = get(case_id).reference
    return None if ref is None else ref.as_dict()


__all__ = [
    "BenchmarkCase",
    "PaperResult",
    "analytic_jets",
    "case_ids",
    "case_to_json",
    "get",
    "list_cases",
    "reference_for",
    "reference_row",
    "self_consistency",
]
