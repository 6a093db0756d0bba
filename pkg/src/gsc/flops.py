"""Floating-point operation accounting for pipeline stages.

Each stage is a dict with a ``kind`` plus the parameters its formula
needs; totals are sums over stages, so the estimate is additive under
pipeline concatenation.  Adapter stages (foundation/generative model
seats) report self-declared counts: the simulator never pretends to know
the cost of an external model.
"""

from __future__ import annotations


class UnknownStageError(ValueError):
    pass


def _pca_project(p):
    return 2 * p["d"] * p["k"] * p["vectors"]


def _per_scalar(p):
    return 2 * p["scalars"]


def _ldpc_decode(p):
    return p["iterations"] * 6 * p["edges"]


def _ldpc_encode(p):
    return 2 * p["m"] * p["k"] * p.get("frames", 1)


def _dct8(p):
    # 2 * N * 8 per 8-point transform, N = 8.
    return 128 * p["transforms"]


def _declared(p):
    return p["flops"]


FORMULAS = {
    "pca_project": _pca_project,
    "pca_reconstruct": _pca_project,
    "quantize": _per_scalar,
    "dequantize": _per_scalar,
    "ldpc_decode": _ldpc_decode,
    "ldpc_encode": _ldpc_encode,
    "dct8": _dct8,
    "adapter": _declared,
}


def flops_estimate(stages) -> int:
    """Total operation count for a pipeline description.

    ``stages`` is an iterable of dicts like ``{"kind": "pca_project",
    "d": 64, "k": 16, "vectors": 100}``.  A stage whose kind has no
    registered formula raises :class:`UnknownStageError`.
    """
    total = 0
    for stage in stages:
        kind = stage.get("kind")
        if kind not in FORMULAS:
            raise UnknownStageError(f"no operation-count formula for stage {kind!r}")
        params = {k: v for k, v in stage.items() if k != "kind"}
        try:
            total += int(FORMULAS[kind](params))
        except KeyError as e:
            raise UnknownStageError(f"stage {kind!r} missing parameter {e.args[0]!r}") from e
    return total
