"""Counterfactual perturbations and comparisons of attack matrices.

A scenario is a list of overrides applied to a copy of the model parameters:
barrier overrides (with '*' wildcards that never touch the diagonal), and
optional replacements for the abandon yield, lambda, interception and yield
vectors.  Built-in scenarios cover the fortress and home-grown counterfactuals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IndexMismatch, ThresholdOutOfRange, UnknownCode
from .evader import AttackMatrix, attack_matrix, target_totals, transition_matrix
from .network import build_network, least_cost_to_end
from .params import BLOCKED, ModelParams, is_blocked


@dataclass
class ScenarioSpec:
    name: str = "unnamed"
    barrier_overrides: list[tuple[str, str, float]] = field(default_factory=list)
    a_override: float | None = None
    lambda_override: float | None = None
    interception_overrides: dict[str, float] = field(default_factory=dict)
    yield_overrides: dict[str, float] = field(default_factory=dict)

    @staticmethod
    def from_json(path: str | Path) -> "ScenarioSpec":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        overrides = [(o, d, _parse_override(v)) for o, d, v in doc.get("barrier_overrides", [])]
        a = doc.get("a_override")
        return ScenarioSpec(
            name=doc.get("name", "unnamed"),
            barrier_overrides=overrides,
            a_override=_parse_override(a) if a is not None else None,
            lambda_override=doc.get("lambda_override"),
            interception_overrides=doc.get("interception_overrides", {}),
            yield_overrides=doc.get("yield_overrides", {}),
        )


def _parse_override(v) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "blocked"):
        return BLOCKED
    return float(v)


def _known_codes(params: ModelParams) -> set[str]:
    codes = set(params.S) | set(params.I) | set(params.Y)
    for i, j in params.T:
        codes.add(i)
        codes.add(j)
    return codes


def apply_scenario(params: ModelParams, spec: ScenarioSpec) -> ModelParams:
    """Return a new ModelParams with the scenario's overrides applied, in order."""
    known = _known_codes(params)
    out = params.copy()
    for origin_pat, dest_pat, cost in spec.barrier_overrides:
        for pat in (origin_pat, dest_pat):
            if pat != "*" and pat not in known:
                raise UnknownCode(pat)
        origins = sorted(known) if origin_pat == "*" else [origin_pat]
        dests = sorted(known) if dest_pat == "*" else [dest_pat]
        for i in origins:
            for j in dests:
                # wildcards never touch domestic barriers
                if i == j and "*" in (origin_pat, dest_pat):
                    continue
                out.T[(i, j)] = cost
    for code, v in spec.interception_overrides.items():
        if code not in out.I:
            raise UnknownCode(code)
        out.I[code] = float(v)
    for code, v in spec.yield_overrides.items():
        if code not in out.Y:
            raise UnknownCode(code)
        out.Y[code] = float(v)
    if spec.a_override is not None:
        out.A = spec.a_override
    if spec.lambda_override is not None:
        out.lam = spec.lambda_override
    return out


def fortress(params: ModelParams, country: str) -> ModelParams:
    """Block every foreign path into one country; its domestic path survives."""
    if country not in _known_codes(params):
        raise UnknownCode(country)
    return apply_scenario(params, ScenarioSpec(
        name=f"fortress-{country}",
        barrier_overrides=[("*", country, BLOCKED)],
    ))


def homegrown(params: ModelParams) -> ModelParams:
    """Block every transnational path; only domestic attacks remain."""
    out = params.copy()
    for (i, j) in out.T:
        if i != j:
            out.T[(i, j)] = BLOCKED
    return out


def solve(params: ModelParams) -> AttackMatrix:
    """Build the network, solve the chain, return the attack matrix."""
    network = build_network(params)
    costs = least_cost_to_end(network)
    chain = transition_matrix(network, costs, params.lam)
    return attack_matrix(chain, params.S)


@dataclass
class SweepCurve:
    a_values: list[float]
    totals: list[float]
    per_target: dict[str, list[float]]
    supply_total: float
    fraction: float | None = None
    threshold: float | None = None


def deterrence_sweep(params: ModelParams, a_values: list[float],
                     lam: float | None = None) -> SweepCurve:
    """Grand-total (and per-target) attack counts as the abandon yield varies."""
    if any(not math.isfinite(a) for a in a_values):
        raise ValueError("sweep grid must be finite")
    if sorted(a_values) != list(a_values):
        raise ValueError("sweep grid must be sorted ascending")
    totals: list[float] = []
    per_target: dict[str, list[float]] = {}
    for a in a_values:
        p = params.copy()
        p.A = a
        if lam is not None:
            p.lam = lam
        matrix = solve(p)
        tt, grand = target_totals(matrix)
        totals.append(grand)
        for t, v in tt.items():
            per_target.setdefault(t, []).append(v)
    supply_total = sum(params.S[c] for c in params.sources)
    return SweepCurve(a_values=list(a_values), totals=totals,
                      per_target=per_target, supply_total=supply_total)


def find_threshold(curve: SweepCurve, fraction: float = 0.5) -> float:
    """Smallest A where the total reaches fraction * max, linearly interpolated."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    if not curve.totals or max(curve.totals) <= 0.0:
        raise ThresholdOutOfRange("curve carries no attack mass anywhere on the grid")
    peak = max(curve.totals)
    target = fraction * peak
    if curve.totals and curve.totals[0] >= target:
        return curve.a_values[0]
    for k in range(1, len(curve.totals)):
        if curve.totals[k] >= target:
            a0, a1 = curve.a_values[k - 1], curve.a_values[k]
            t0, t1 = curve.totals[k - 1], curve.totals[k]
            if t1 == t0:
                return a1
            return a0 + (target - t0) * (a1 - a0) / (t1 - t0)
    raise ThresholdOutOfRange(f"total never reaches {fraction:.0%} of its maximum")


@dataclass
class DeltaMatrix:
    sources: list[str]
    targets: list[str]
    delta: dict[tuple[str, str], float]
    target_deltas: dict[str, float]
    ranked_targets: list[tuple[str, float]]  # by total increase, descending


def diff_matrices(base: AttackMatrix, alt: AttackMatrix) -> DeltaMatrix:
    """Entrywise alt - base, with targets ranked by absolute total increase."""
    if base.sources != alt.sources or base.targets != alt.targets:
        raise IndexMismatch("attack matrices have different source/target sets")
    delta: dict[tuple[str, str], float] = {}
    for key in set(base.N) | set(alt.N):
        d = alt.N.get(key, 0.0) - base.N.get(key, 0.0)
        if d != 0.0:
            delta[key] = d
    base_tt, _ = target_totals(base)
    alt_tt, _ = target_totals(alt)
    target_deltas = {t: alt_tt[t] - base_tt[t] for t in base.targets}
    ranked = sorted(target_deltas.items(), key=lambda kv: (-kv[1], kv[0]))
    return DeltaMatrix(sources=list(base.sources), targets=list(base.targets),
                       delta=delta, target_deltas=target_deltas, ranked_targets=ranked)


def builtin_scenario(name: str, params: ModelParams) -> ModelParams:
    """Named scenarios usable directly from the CLI."""
    if name == "fortress-USA":
        return fortress(params, "USA")
    if name == "homegrown":
        return homegrown(params)
    raise KeyError(f"no built-in scenario named {name!r}")
