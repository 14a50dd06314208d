"""Declarative scenario files.

A scenario is a single JSON document describing an experiment: the space
dimension, a named set of contexts, a protocol (ordered context names plus
the known initial outcome), an optional meter coupling, and optional
parameter grids.  Complex matrix entries are written either as plain
numbers or as two-element ``[re, im]`` arrays.

Parsing is strict: unknown keys are rejected, every referenced name must
resolve, and dimensions must be consistent, so a scenario that parses will
also build (up to numerical validation of explicit matrices, which happens
at construction time).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ScenarioParseError, ScenarioValidationError
from .hilbert import ContextSpec

SCHEMA_VERSION = 1

_CONTEXT_KEYS = {
    "computational": {"kind"},
    "fourier": {"kind"},
    "rotation": {"kind", "theta"},
    "haar": {"kind", "seed"},
    "explicit": {"kind", "matrix"},
}
_GRAM_KEYS = {"uniform": {"kind", "g"}, "explicit": {"kind", "matrix"}}
_SWEEP_KEYS = {"g", "m_count", "phase"}


@dataclass(frozen=True)
class GramSpec:
    kind: str
    g: float | None = None
    matrix: np.ndarray | None = None


@dataclass(frozen=True)
class MeterSpec:
    pointer: str
    gram: GramSpec


@dataclass(frozen=True)
class ProtocolSpec:
    initial_context: str
    initial_index: int
    sequence: tuple[str, ...]


@dataclass(frozen=True)
class SweepSpec:
    g: tuple[float, ...] | None = None
    m_count: tuple[int, ...] | None = None
    phase: tuple[float, ...] | None = None


@dataclass(frozen=True)
class Scenario:
    """Validated scenario plus the raw document it came from (for echoing)."""

    dim: int
    contexts: dict[str, ContextSpec]
    protocol: ProtocolSpec
    meter: MeterSpec | None
    sweep: SweepSpec | None
    raw: dict


def _require_keys(field: str, data: dict, required: set[str], allowed: set[str]) -> None:
    if not isinstance(data, dict):
        raise ScenarioValidationError(field, f"expected an object, got {type(data).__name__}")
    for key in data:
        if key not in allowed:
            raise ScenarioValidationError(f"{field}.{key}", "unknown key")
    for key in required:
        if key not in data:
            raise ScenarioValidationError(f"{field}.{key}", "missing required key")


def _number(field: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValidationError(field, f"expected a number, got {value!r}")
    return float(value)


def _integer(field: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioValidationError(field, f"expected an integer, got {value!r}")
    return value


def _complex_entry(field: str, value) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(_number(f"{field}[0]", value[0]), _number(f"{field}[1]", value[1]))
    raise ScenarioValidationError(field, f"expected a number or [re, im] pair, got {value!r}")


def _matrix(field: str, data, dim: int) -> np.ndarray:
    if not isinstance(data, list) or len(data) != dim:
        raise ScenarioValidationError(field, f"expected {dim} rows")
    rows = []
    for r, row in enumerate(data):
        if not isinstance(row, list) or len(row) != dim:
            raise ScenarioValidationError(f"{field}[{r}]", f"expected {dim} entries")
        rows.append([_complex_entry(f"{field}[{r}][{c}]", v) for c, v in enumerate(row)])
    return np.array(rows, dtype=complex)


def _parse_context_spec(field: str, data, dim: int) -> ContextSpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise ScenarioValidationError(field, "expected an object with a 'kind' key")
    kind = data["kind"]
    if kind not in _CONTEXT_KEYS:
        raise ScenarioValidationError(f"{field}.kind", f"unknown context kind {kind!r}")
    _require_keys(field, data, _CONTEXT_KEYS[kind], _CONTEXT_KEYS[kind])
    if kind == "rotation":
        if dim != 2:
            raise ScenarioValidationError(field, f"rotation contexts require dim 2, scenario has dim {dim}")
        return ContextSpec(kind, dim, theta=_number(f"{field}.theta", data["theta"]))
    if kind == "haar":
        return ContextSpec(kind, dim, seed=_integer(f"{field}.seed", data["seed"]))
    if kind == "explicit":
        return ContextSpec(kind, dim, matrix=_matrix(f"{field}.matrix", data["matrix"], dim))
    return ContextSpec(kind, dim)


def _parse_gram_spec(field: str, data, dim: int) -> GramSpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise ScenarioValidationError(field, "expected an object with a 'kind' key")
    kind = data["kind"]
    if kind not in _GRAM_KEYS:
        raise ScenarioValidationError(f"{field}.kind", f"unknown gram kind {kind!r}")
    _require_keys(field, data, _GRAM_KEYS[kind], _GRAM_KEYS[kind])
    if kind == "uniform":
        g = _number(f"{field}.g", data["g"])
        if not 0.0 <= g <= 1.0:
            raise ScenarioValidationError(f"{field}.g", f"strength {g!r} outside [0, 1]")
        return GramSpec(kind, g=g)
    return GramSpec(kind, matrix=_matrix(f"{field}.matrix", data["matrix"], dim))


def parse_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario file.

    Raises
    ------
    FileNotFoundError
        Missing file.
    ScenarioParseError
        Syntactically invalid JSON, with line/column.
    ScenarioValidationError
        Schema violation, naming the offending field.
    """
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioParseError(err.msg, err.lineno, err.colno) from err
    if not isinstance(raw, dict):
        raise ScenarioValidationError("document", "top level must be an object")

    _require_keys(
        "document",
        raw,
        {"schema_version", "dim", "contexts", "protocol"},
        {"schema_version", "dim", "contexts", "protocol", "meter", "sweep"},
    )
    if raw["schema_version"] != SCHEMA_VERSION:
        raise ScenarioValidationError(
            "schema_version", f"expected {SCHEMA_VERSION}, got {raw['schema_version']!r}"
        )
    dim = _integer("dim", raw["dim"])
    if dim < 2:
        raise ScenarioValidationError("dim", f"must be >= 2, got {dim}")

    if not isinstance(raw["contexts"], dict) or not raw["contexts"]:
        raise ScenarioValidationError("contexts", "expected a non-empty object")
    contexts = {
        name: _parse_context_spec(f"contexts.{name}", spec, dim)
        for name, spec in raw["contexts"].items()
    }

    _require_keys("protocol", raw["protocol"], {"initial", "sequence"}, {"initial", "sequence"})
    _require_keys(
        "protocol.initial", raw["protocol"]["initial"], {"context", "index"}, {"context", "index"}
    )
    sequence = raw["protocol"]["sequence"]
    if not isinstance(sequence, list) or not sequence:
        raise ScenarioValidationError("protocol.sequence", "expected a non-empty list of names")
    for pos, name in enumerate(sequence):
        if name not in contexts:
            raise ScenarioValidationError(
                f"protocol.sequence[{pos}]", f"undefined context {name!r}"
            )
    initial_context = raw["protocol"]["initial"]["context"]
    if initial_context not in contexts:
        raise ScenarioValidationError(
            "protocol.initial.context", f"undefined context {initial_context!r}"
        )
    if initial_context != sequence[0]:
        raise ScenarioValidationError(
            "protocol.initial.context",
            f"{initial_context!r} is not the first context of the sequence ({sequence[0]!r})",
        )
    initial_index = _integer("protocol.initial.index", raw["protocol"]["initial"]["index"])
    if not 0 <= initial_index < dim:
        raise ScenarioValidationError(
            "protocol.initial.index", f"{initial_index} not in [0, {dim})"
        )
    protocol = ProtocolSpec(initial_context, initial_index, tuple(sequence))

    meter = None
    if "meter" in raw:
        _require_keys("meter", raw["meter"], {"pointer", "gram"}, {"pointer", "gram"})
        pointer = raw["meter"]["pointer"]
        if pointer not in contexts:
            raise ScenarioValidationError("meter.pointer", f"undefined context {pointer!r}")
        meter = MeterSpec(pointer, _parse_gram_spec("meter.gram", raw["meter"]["gram"], dim))

    sweep = None
    if "sweep" in raw:
        _require_keys("sweep", raw["sweep"], set(), _SWEEP_KEYS)
        values: dict = {}
        for key in raw["sweep"]:
            entries = raw["sweep"][key]
            if not isinstance(entries, list) or not entries:
                raise ScenarioValidationError(f"sweep.{key}", "expected a non-empty list")
            if key == "m_count":
                parsed = tuple(_integer(f"sweep.m_count[{i}]", v) for i, v in enumerate(entries))
                if any(v < 0 for v in parsed):
                    raise ScenarioValidationError("sweep.m_count", "chain lengths must be >= 0")
            else:
                parsed = tuple(_number(f"sweep.{key}[{i}]", v) for i, v in enumerate(entries))
                if key == "g" and any(not 0.0 <= v <= 1.0 for v in parsed):
                    raise ScenarioValidationError("sweep.g", "strengths must lie in [0, 1]")
            values[key] = parsed
        if ("g" in values or "m_count" in values) and meter is None:
            raise ScenarioValidationError("sweep", "g and m_count sweeps require a meter section")
        if "phase" in values and len(sequence) < 2:
            raise ScenarioValidationError(
                "sweep.phase", "phase sweeps need a protocol with at least two contexts"
            )
        sweep = SweepSpec(values.get("g"), values.get("m_count"), values.get("phase"))

    return Scenario(dim, contexts, protocol, meter, sweep, raw)
