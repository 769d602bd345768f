"""Randomized search for censoring-violating architectures.

A violation is a (circuit, deleted gate) pair where deletion improves the
scrambling measure: increases a spectral gap or decreases the multiplicative
error.  Searches are deterministic given the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

from .arch import Architecture, ArchitectureError, Gate, censor, to_document
from .channel import EngineError, has_string_collapse, mult_error
from .transfer import circuit_spectrum

TIE_TOL = 1e-10

METRICS = ("eigen_gap", "singular_gap", "mult_error")
SCOPES = ("any_gate", "interior_only", "last_gate")


EXHAUSTIVE_CAP = 300_000


@dataclass(frozen=True)
class SearchConfig:
    n_sites: int
    max_gates: int
    metric: str = "eigen_gap"
    deletion_scope: str = "last_gate"
    q: int = 2
    gate_arity: int = 2
    seed: int = 0
    samples: int = 100
    exhaustive: bool = False
    require_collapse: bool = False

    def __post_init__(self):
        if self.n_sites < 2 or self.max_gates < 1 or self.samples < 1:
            raise ValueError("search bounds must be positive")
        if self.metric not in METRICS:
            raise ValueError(f"metric {self.metric!r} not in {METRICS}")
        if self.deletion_scope not in SCOPES:
            raise ValueError(f"scope {self.deletion_scope!r} not in {SCOPES}")
        if self.metric == "mult_error" and self.n_sites > 4:
            raise ValueError("mult_error metric budgeted for n_sites <= 4")
        if self.exhaustive:
            pairs = len(list(combinations(range(self.n_sites), self.gate_arity)))
            total = sum(pairs**k for k in range(1, self.max_gates + 1))
            if total > EXHAUSTIVE_CAP:
                raise ValueError(
                    f"exhaustive enumeration of {total} candidates exceeds the "
                    f"cap {EXHAUSTIVE_CAP}; shrink n_sites or max_gates"
                )


@dataclass(frozen=True)
class Violation:
    architecture: Architecture
    deleted_index: int
    metric: str
    value_before: float
    value_after: float
    margin: float

    def to_json(self) -> str:
        return json.dumps({
            "metric": self.metric,
            "deleted_index": self.deleted_index,
            "value_before": self.value_before,
            "value_after": self.value_after,
            "margin": self.margin,
            "architecture": to_document(self.architecture),
        })


def sample_architecture(config: SearchConfig, rng: np.random.Generator,
                        max_tries: int = 500) -> Architecture:
    """Uniform random ordered list of at most max_gates arity-sized gates,
    rejected until every site is covered (and, when asked, until a
    consecutive gate pair covers all sites)."""
    pairs = list(combinations(range(config.n_sites), config.gate_arity))
    for _ in range(max_tries):
        count = int(rng.integers(1, config.max_gates + 1))
        gates = tuple(
            Gate(frozenset(pairs[rng.integers(len(pairs))])) for _ in range(count)
        )
        arch = Architecture((config.q,) * config.n_sites, gates)
        if not arch.covered:
            continue
        if config.require_collapse and not has_string_collapse(arch):
            continue
        return arch
    raise ArchitectureError(
        f"rejection budget exhausted sampling covered architectures "
        f"(n={config.n_sites}, gates<={config.max_gates})"
    )


def _metric_value(arch: Architecture, metric: str) -> float:
    if metric == "eigen_gap":
        return circuit_spectrum(arch).gap
    if metric == "singular_gap":
        r = circuit_spectrum(arch, want_singular=True)
        return 1.0 - r.singular_subleading
    return mult_error(arch).eps_m


def _margin(before: float, after: float, metric: str) -> float:
    if metric == "mult_error":
        return before - after  # error decreased
    return after - before      # gap increased


def _deletable_indices(count: int, scope: str) -> list[int]:
    if count < 2:
        return []
    if scope == "last_gate":
        return [count - 1]
    if scope == "interior_only":
        return list(range(1, count - 1))
    return list(range(count))


def _enumerate_architectures(config: SearchConfig) -> Iterator[Architecture]:
    from itertools import product

    pairs = list(combinations(range(config.n_sites), config.gate_arity))
    for count in range(1, config.max_gates + 1):
        for combo in product(pairs, repeat=count):
            arch = Architecture(
                (config.q,) * config.n_sites,
                tuple(Gate(frozenset(p)) for p in combo),
            )
            if arch.covered:
                yield arch


def _candidates(config: SearchConfig) -> Iterator[Architecture]:
    if config.exhaustive:
        yield from _enumerate_architectures(config)
        return
    rng = np.random.default_rng(config.seed)
    for _ in range(config.samples):
        yield sample_architecture(config, rng)


def scan(config: SearchConfig, on_error: str = "skip") -> list[Violation]:
    """Evaluate each candidate architecture with and without each deletable
    gate; return violations sorted by margin, largest first.

    Candidates are random samples, or the full covered enumeration when the
    config is exhaustive.  Candidates whose censored form is uncovered, or
    whose metric engine refuses the size, are skipped (``on_error='raise'``
    propagates instead).  Margins within the tie tolerance are discarded as
    numerical noise.
    """
    found: list[Violation] = []
    for arch in _candidates(config):
        try:
            before = _metric_value(arch, config.metric)
        except (EngineError, ArchitectureError):
            if on_error == "raise":
                raise
            continue
        for idx in _deletable_indices(len(arch.gates), config.deletion_scope):
            cens = censor(arch, {idx})
            if not cens.covered:
                continue
            try:
                after = _metric_value(cens, config.metric)
            except (EngineError, ArchitectureError):
                if on_error == "raise":
                    raise
                continue
            margin = _margin(before, after, config.metric)
            if margin > TIE_TOL:
                found.append(Violation(arch, idx, config.metric,
                                       before, after, margin))
    found.sort(key=lambda v: -v.margin)
    return found


def violations_jsonl(violations: list[Violation]) -> str:
    return "\n".join(v.to_json() for v in violations)


def replay(line: str) -> tuple[Architecture, Violation]:
    """Rebuild a violation from its JSON line and recompute its margin."""
    from .arch import from_document

    doc = json.loads(line)
    arch = from_document(doc["architecture"])
    metric = doc["metric"]
    idx = int(doc["deleted_index"])
    before = _metric_value(arch, metric)
    after = _metric_value(censor(arch, {idx}), metric)
    viol = Violation(arch, idx, metric, before, after,
                     _margin(before, after, metric))
    return arch, viol
