"""Scenario execution: reports, invariant verification, parameter sweeps.

Reports are plain dicts of JSON-serializable values, built in a fixed key
order, so serializing one is byte-reproducible for identical inputs; the
ensemble is reproducible by construction (per-trajectory seeds), so worker
count does not affect the output either.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from ._version import __version__
from .errors import CsmSimError, InvalidGramMatrix, NonOrthonormalInput
from .hilbert import (
    Context,
    Modality,
    build_context,
    context_change_unitary,
    orthonormality_residual,
)
from .measurement import (
    interference_return,
    irreversible_return,
    reversible_return,
    transition_matrix,
)
from .qnd import (
    composite_return_probability,
    density_matrix_residuals,
    entangle,
    gram_uniform,
    meter_return_probability,
    meter_states_from_gram,
    meter_chain_reduced_state,
    reduced_system_state,
    validate_gram,
)
from .scenario import GramSpec, Scenario
from .trajectory import (
    Protocol,
    exhaustive_entropy_production,
    final_marginal,
    mean_entropy_production,
    meter_protocol_entropy,
)

ENV_WORKERS = "CSM_SIM_THREADS"


def resolve_workers(n_workers: int | None = None) -> int:
    """Explicit count, else the CSM_SIM_THREADS cap, else serial."""
    if n_workers is not None:
        if n_workers < 1:
            raise ValueError(f"worker count must be >= 1, got {n_workers}")
        return int(n_workers)
    env = os.environ.get(ENV_WORKERS)
    if env is None or not env.strip():
        return 1
    count = int(env)
    if count < 1:
        raise ValueError(f"{ENV_WORKERS} must be >= 1, got {env!r}")
    return count


def build_gram(spec: GramSpec, dim: int) -> np.ndarray:
    if spec.kind == "uniform":
        return gram_uniform(dim, spec.g)
    return validate_gram(spec.matrix)


def build_scenario_objects(scenario: Scenario):
    """Materialize the scenario: contexts by name, protocol, pointer, overlap matrix."""
    contexts = {
        name: build_context(spec, id=name) for name, spec in scenario.contexts.items()
    }
    first = contexts[scenario.protocol.initial_context]
    initial = Modality(first, scenario.protocol.initial_index)
    protocol = Protocol(
        tuple(contexts[name] for name in scenario.protocol.sequence), initial
    )
    pointer = gram = None
    if scenario.meter is not None:
        pointer = contexts[scenario.meter.pointer]
        gram = build_gram(scenario.meter.gram, scenario.dim)
    return contexts, protocol, pointer, gram


def _floats(values) -> list[float]:
    return [float(v) for v in np.asarray(values).ravel()]


def _g_sweep_rows(initial: Modality, pointer: Context, values) -> list[dict]:
    rows = []
    for g in values:
        gram = gram_uniform(pointer.dim, g)
        rows.append(
            {
                "g": float(g),
                "return_probabilities": [
                    meter_return_probability(initial, pointer, gram, k)
                    for k in range(pointer.dim)
                ],
                "entropy": meter_protocol_entropy(initial, pointer, gram),
            }
        )
    return rows


def _m_count_sweep_rows(
    initial: Modality, pointer: Context, gram: np.ndarray, values
) -> list[dict]:
    rows = []
    off_mask = ~np.eye(pointer.dim, dtype=bool)
    for m in values:
        rho = meter_chain_reduced_state(initial, pointer, gram, int(m))
        rows.append(
            {
                "m_count": int(m),
                "diagonal": _floats(rho.diagonal().real),
                "max_coherence": float(np.max(np.abs(rho[off_mask]))),
            }
        )
    return rows


def _phase_sweep_rows(initial: Modality, intermediate: Context, values) -> list[dict]:
    rows = []
    for phi in values:
        # one reference path at phase zero, every other path shifted by phi
        phases = np.full(intermediate.dim, float(phi))
        phases[0] = 0.0
        rows.append(
            {
                "phase": float(phi),
                "return_probabilities": [
                    interference_return(initial, intermediate, phases, k)
                    for k in range(intermediate.dim)
                ],
            }
        )
    return rows


def sweep_rows(scenario: Scenario, param: str, values) -> list[dict]:
    """Grid-complete sweep rows for one parameter; one row per grid point."""
    contexts, protocol, pointer, gram = build_scenario_objects(scenario)
    initial = protocol.initial
    if param == "g":
        if pointer is None:
            raise CsmSimError("a g sweep requires a meter section")
        return _g_sweep_rows(initial, pointer, values)
    if param == "m_count":
        if pointer is None or gram is None:
            raise CsmSimError("an m_count sweep requires a meter section")
        return _m_count_sweep_rows(initial, pointer, gram, values)
    if param == "phase":
        if len(protocol) < 2:
            raise CsmSimError("a phase sweep requires at least two protocol contexts")
        return _phase_sweep_rows(initial, protocol.contexts[1], values)
    raise ValueError(f"unknown sweep parameter {param!r}")


def sweep_table(param: str, rows: list[dict], dim: int) -> tuple[list[str], list[list]]:
    """Flatten sweep rows into a header and value rows for CSV output."""
    if param == "g":
        header = ["g", "entropy"] + [f"p_return_{k}" for k in range(dim)]
        table = [[r["g"], r["entropy"], *r["return_probabilities"]] for r in rows]
    elif param == "m_count":
        header = ["m_count", "max_coherence"] + [f"diag_{j}" for j in range(dim)]
        table = [[r["m_count"], r["max_coherence"], *r["diagonal"]] for r in rows]
    elif param == "phase":
        header = ["phase"] + [f"p_return_{k}" for k in range(dim)]
        table = [[r["phase"], *r["return_probabilities"]] for r in rows]
    else:
        raise ValueError(f"unknown sweep parameter {param!r}")
    return header, table


def format_csv(header: list[str], table: list[list]) -> str:
    lines = [",".join(header)]
    for row in table:
        cells = [str(v) if isinstance(v, int) else "%.17g" % v for v in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def run_scenario(
    scenario: Scenario,
    seed: int,
    n_samples: int,
    exhaustive: bool = False,
    n_workers: int | None = None,
) -> dict:
    """Execute a scenario and return the report as a JSON-ready dict.

    Covers the exact return probabilities for every context change in the
    protocol, the meter quantities if a meter is configured, the trajectory
    ensemble (Monte Carlo, or exact enumeration when ``exhaustive``), and
    the configured sweep grids.  Deterministic given (scenario, seed,
    n_samples), independent of the worker count.
    """
    workers = resolve_workers(n_workers)
    contexts, protocol, pointer, gram = build_scenario_objects(scenario)
    initial = protocol.initial
    dim = scenario.dim

    returns = []
    for step, name in enumerate(scenario.protocol.sequence[1:], start=1):
        ctx = contexts[name]
        returns.append(
            {
                "step": step,
                "intermediate": name,
                "reversible": [reversible_return(initial, ctx, k) for k in range(dim)],
                "irreversible": [irreversible_return(initial, ctx, k) for k in range(dim)],
            }
        )

    meter_section = None
    if pointer is not None:
        meters = meter_states_from_gram(gram)
        state = entangle(initial, pointer, meters)
        rho = reduced_system_state(state, gram, pointer)
        off_mask = ~np.eye(dim, dtype=bool)
        meter_section = {
            "pointer": scenario.meter.pointer,
            "return_probabilities": [
                meter_return_probability(initial, pointer, gram, k) for k in range(dim)
            ],
            "reduced_state_diagonal": _floats(rho.diagonal().real),
            "max_coherence": float(np.max(np.abs(rho[off_mask]))),
            "coherence_magnitudes": [_floats(np.abs(rho[j])) for j in range(dim)],
            "entropy": meter_protocol_entropy(initial, pointer, gram),
        }

    if exhaustive:
        exact = exhaustive_entropy_production(protocol)
        ensemble = {
            "mode": "exhaustive",
            "sample_count": exact.path_count,
            "mean_entropy_production": exact.mean_entropy_production,
            "std_error": 0.0,
            "final_distribution": _floats(exact.final_distribution),
            "shannon_entropy_final": exact.shannon_entropy_final,
        }
    else:
        stats = mean_entropy_production(protocol, n_samples, seed, n_workers=workers)
        ensemble = {
            "mode": "monte_carlo",
            "sample_count": stats.sample_count,
            "mean_entropy_production": stats.mean_entropy_production,
            "std_error": stats.std_error,
            "final_distribution": _floats(stats.final_distribution),
            "shannon_entropy_final": stats.shannon_entropy_final,
        }

    sweep_section = None
    if scenario.sweep is not None:
        sweep_section = {}
        if scenario.sweep.g is not None:
            sweep_section["g"] = _g_sweep_rows(initial, pointer, scenario.sweep.g)
        if scenario.sweep.m_count is not None:
            sweep_section["m_count"] = _m_count_sweep_rows(
                initial, pointer, gram, scenario.sweep.m_count
            )
        if scenario.sweep.phase is not None:
            sweep_section["phase"] = _phase_sweep_rows(
                initial, protocol.contexts[1], scenario.sweep.phase
            )

    return {
        "tool": "csm-sim",
        "version": __version__,
        "seed": int(seed),
        "n_samples": int(n_samples),
        "scenario": scenario.raw,
        "results": {
            "returns": returns,
            "meter": meter_section,
            "ensemble": ensemble,
            "sweep": sweep_section,
        },
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def verify_scenario(scenario: Scenario, tolerance: float) -> tuple[bool, list[dict]]:
    """Measure every invariant residual on the scenario's objects.

    Returns (all passed, checks); each check carries its name, the measured
    residual and whether it is within ``tolerance``.  If an object cannot be
    built at all, its residual is recorded and dependent checks are skipped.
    """
    checks: list[dict] = []

    def add(name: str, residual: float) -> bool:
        ok = bool(residual <= tolerance)
        checks.append({"name": name, "residual": float(residual), "pass": ok})
        return ok

    contexts: dict[str, Context] = {}
    buildable = True
    for name, spec in scenario.contexts.items():
        try:
            ctx = build_context(spec, id=name)
        except NonOrthonormalInput:
            add(f"context[{name}].orthonormal", orthonormality_residual(spec.matrix))
            buildable = False
            continue
        contexts[name] = ctx
        add(f"context[{name}].orthonormal", orthonormality_residual(ctx.basis))
        proj_residual = 0.0
        total = np.zeros((ctx.dim, ctx.dim), dtype=complex)
        for j in range(ctx.dim):
            p = ctx.projector(j)
            proj_residual = max(
                proj_residual,
                float(np.max(np.abs(p @ p - p))),
                float(np.max(np.abs(p - p.conj().T))),
                abs(complex(np.trace(p)) - 1.0),
            )
            total += p
        add(f"context[{name}].projectors", proj_residual)
        add(f"context[{name}].closure", float(np.max(np.abs(total - np.eye(ctx.dim)))))

    if not buildable:
        return all(c["pass"] for c in checks), checks

    _, protocol, pointer, _ = build_scenario_objects(scenario)
    initial = protocol.initial
    dim = scenario.dim
    eye = np.eye(dim)
    for step, (a, b) in enumerate(zip(protocol.contexts[:-1], protocol.contexts[1:])):
        u = context_change_unitary(a, b)
        add(f"step[{step}].unitarity", float(np.max(np.abs(u.conj().T @ u - eye))))
        t = transition_matrix(a, b)
        sums = max(
            float(np.max(np.abs(t.sum(axis=0) - 1.0))),
            float(np.max(np.abs(t.sum(axis=1) - 1.0))),
        )
        add(f"step[{step}].transition_sums", sums)
        rev = np.array(
            [
                [reversible_return(Modality(a, i), b, k) for i in range(dim)]
                for k in range(dim)
            ]
        )
        add(f"step[{step}].reversible_identity", float(np.max(np.abs(rev - eye))))

    if scenario.meter is not None:
        gram_ok = True
        try:
            gram = build_gram(scenario.meter.gram, dim)
            add("meter.gram_valid", 0.0)
        except InvalidGramMatrix:
            raw = np.asarray(scenario.meter.gram.matrix, dtype=complex)
            residual = max(
                float(np.max(np.abs(raw - raw.conj().T))),
                float(np.max(np.abs(np.diagonal(raw) - 1.0))),
                max(0.0, -float(np.linalg.eigvalsh(0.5 * (raw + raw.conj().T))[0])),
            )
            add("meter.gram_valid", residual)
            gram_ok = False
        if gram_ok:
            meters = meter_states_from_gram(gram)
            add(
                "meter.states_reproduce_overlaps",
                float(np.max(np.abs(meters.conj().T @ meters - gram))),
            )
            state = entangle(initial, pointer, meters)
            add("meter.composite_norm", abs(float(np.linalg.norm(state)) - 1.0))
            probs = np.array(
                [meter_return_probability(initial, pointer, gram, k) for k in range(dim)]
            )
            add("meter.return_normalization", abs(float(probs.sum()) - 1.0))
            two_form = max(
                abs(
                    probs[k]
                    - composite_return_probability(state, initial.context, pointer, k)
                )
                for k in range(dim)
            )
            add("meter.return_two_form_agreement", float(two_form))
            rho = reduced_system_state(state, gram, pointer)
            residuals = density_matrix_residuals(rho)
            add("meter.reduced_state", max(residuals.values()))

    marginal = final_marginal(protocol)
    marginal_residual = max(
        abs(float(marginal.sum()) - 1.0),
        max(0.0, -float(marginal.min())),
        max(0.0, float(marginal.max()) - 1.0),
    )
    add("protocol.final_marginal", marginal_residual)

    return all(c["pass"] for c in checks), checks


def verify_report(scenario: Scenario, tolerance: float) -> dict:
    ok, checks = verify_scenario(scenario, tolerance)
    return {
        "tool": "csm-sim",
        "version": __version__,
        "tolerance": float(tolerance),
        "pass": ok,
        "checks": checks,
    }
