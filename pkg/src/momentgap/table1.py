"""The twelve-cell censoring-inequality verification suite.

Rows: eigenvalue gap, singular-value gap, additive error, multiplicative
error.  Columns: arbitrary-gate deletion, boundary-gate deletion, graph-edge
deletion.  A cell marked False expects a concrete counterexample; a cell
marked True expects a property sweep to find no violation.

Additive-error cells are certified through the two-sided sandwich
lam <= eps_A <= 2 eps_M <= 2 q^(2Nt) lam, evaluated in log space where the
raw powers underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arch import censor, cyclic_shift, hide_seek_C, hide_seek_Cprime
from .channel import has_string_collapse, mult_error
from .closedform import depth_threshold, lambda_C, lambda_Cprime
from .graphs import graph_gap, lollipop, path
from .search import SearchConfig, sample_architecture
from .transfer import circuit_spectrum

# True = censoring inequality holds (sweep finds nothing);
# False = counterexample expected.
EXPECTED = {
    ("eigen_gap", "arbitrary"): False,
    ("eigen_gap", "boundary"): False,
    ("eigen_gap", "graph"): False,
    ("singular_gap", "arbitrary"): False,
    ("singular_gap", "boundary"): True,
    ("singular_gap", "graph"): False,
    ("additive_error", "arbitrary"): False,
    ("additive_error", "boundary"): True,
    ("additive_error", "graph"): False,
    ("mult_error", "arbitrary"): False,
    ("mult_error", "boundary"): True,
    ("mult_error", "graph"): False,
}


@dataclass
class CellResult:
    row: str
    column: str
    expected_holds: bool
    observed_holds: bool
    evidence: str

    @property
    def ok(self) -> bool:
        return self.expected_holds == self.observed_holds


def _sweep_architectures(rng, trials, n_choices, for_mult_error):
    """Random covered circuits whose last-gate deletion stays covered (and,
    for the multiplicative-error engines, stays string-collapsed)."""
    out = []
    while len(out) < trials:
        n = int(rng.choice(n_choices))
        cfg = SearchConfig(n_sites=n, max_gates=max(4, n + 2), seed=0,
                           require_collapse=for_mult_error and n > 3)
        arch = sample_architecture(cfg, rng)
        if len(arch.gates) < 2:
            continue
        cens = censor(arch, {len(arch.gates) - 1})
        if not cens.covered:
            continue
        if for_mult_error and cens.n > 3 and not has_string_collapse(cens):
            continue
        out.append((arch, cens))
    return out


def cell_eigen_arbitrary() -> CellResult:
    lam_full = abs(circuit_spectrum(hide_seek_C(5)).subleading)
    lam_cens = abs(circuit_spectrum(hide_seek_Cprime(5)).subleading)
    holds = lam_cens >= lam_full - 1e-12
    return CellResult(
        "eigen_gap", "arbitrary", EXPECTED[("eigen_gap", "arbitrary")], holds,
        f"hide_seek_C(5) lam={lam_full:.6f}, interior deletion -> {lam_cens:.6f}",
    )


def cell_eigen_boundary() -> CellResult:
    shifted = cyclic_shift(hide_seek_C(5), 2)
    cens = censor(shifted, {len(shifted.gates) - 1})
    lam_full = abs(circuit_spectrum(shifted).subleading)
    lam_cens = abs(circuit_spectrum(cens).subleading)
    holds = lam_cens >= lam_full - 1e-12
    return CellResult(
        "eigen_gap", "boundary", EXPECTED[("eigen_gap", "boundary")], holds,
        f"cyclic shift 2 of hide_seek_C(5): last-gate deletion "
        f"lam {lam_full:.6f} -> {lam_cens:.6f}",
    )


def cell_eigen_graph() -> CellResult:
    gap_path = graph_gap(path(10)).gap
    gap_lolli = graph_gap(lollipop(10, 3)).gap
    holds = gap_lolli >= gap_path - 1e-12
    return CellResult(
        "eigen_gap", "graph", EXPECTED[("eigen_gap", "graph")], holds,
        f"path(10) gap={gap_path:.6f}, lollipop(10,3) gap={gap_lolli:.6f} "
        f"despite extra edges",
    )


def cell_singular_arbitrary() -> CellResult:
    s_full = circuit_spectrum(hide_seek_C(5), want_singular=True).singular_subleading
    s_cens = circuit_spectrum(hide_seek_Cprime(5), want_singular=True).singular_subleading
    holds = s_cens >= s_full - 1e-12
    return CellResult(
        "singular_gap", "arbitrary", EXPECTED[("singular_gap", "arbitrary")],
        holds, f"hide_seek s: {s_full:.6f} -> {s_cens:.6f} under interior deletion",
    )


def cell_singular_boundary(trials: int = 120, seed: int = 11) -> CellResult:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for arch, cens in _sweep_architectures(rng, trials, range(3, 9), False):
        s_full = circuit_spectrum(arch, want_singular=True).singular_subleading
        s_cens = circuit_spectrum(cens, want_singular=True).singular_subleading
        worst = min(worst, s_cens - s_full)
    holds = worst >= -1e-10
    return CellResult(
        "singular_gap", "boundary", EXPECTED[("singular_gap", "boundary")],
        holds, f"{trials} random circuits (N in 3..8): min s_cens - s_full = {worst:.3e}",
    )


def cell_singular_graph() -> CellResult:
    base = cell_eigen_graph()
    return CellResult(
        "singular_gap", "graph", EXPECTED[("singular_gap", "graph")],
        base.observed_holds,
        "edge-averaged operators are Gram-self-adjoint, so the eigen "
        "counterexample carries over: " + base.evidence,
    )


def _design_error_certificate(lam_full: float, lam_cens: float, n: int,
                              t: int = 2, q: int = 2) -> tuple[bool, int, float]:
    """Certified depth at which the deleted circuit is strictly closer to Haar.

    In logs: lam_full^d > 2 q^(2Nt) lam_cens^d for some d iff
    lam_full > lam_cens; returns (certified, d, log10 margin at d).
    """
    if not lam_full > lam_cens > 0:
        return False, 0, 0.0
    gap = math.log(lam_full) - math.log(lam_cens)
    offset = math.log(2.0) + 2 * n * t * math.log(q)
    d = int(math.ceil(offset / gap)) + 1
    margin = (d * gap - offset) / math.log(10.0)
    return True, d, margin


def cell_additive_arbitrary() -> CellResult:
    lam = lambda_C(5, 2)
    lam_p = lambda_Cprime(5, 2)
    cert, d, margin = _design_error_certificate(lam, lam_p, 5)
    dt = depth_threshold(5, 2, 2, lam, lam_p)
    holds = not cert
    return CellResult(
        "additive_error", "arbitrary", EXPECTED[("additive_error", "arbitrary")],
        holds,
        f"lam^d > 2*2^(2Nt)*lam'^d certified at d={d} (log10 margin "
        f"{margin:.2f}); threshold formula gives d={dt.depth}",
    )


def cell_additive_boundary(trials: int = 60, seed: int = 12) -> CellResult:
    # testable consequence of eps_A <= eps_A': lam(full) <= 2 eps_M(censored)
    rng = np.random.default_rng(seed)
    worst = math.inf
    for arch, cens in _sweep_architectures(rng, trials, (3, 4), True):
        lam_full = abs(circuit_spectrum(arch).subleading)
        eps_cens = mult_error(cens).eps_m
        worst = min(worst, 2.0 * eps_cens - lam_full)
    holds = worst >= -1e-10
    return CellResult(
        "additive_error", "boundary", EXPECTED[("additive_error", "boundary")],
        holds,
        f"{trials} random circuits: min 2 eps_M(censored) - lam(full) = {worst:.3e}",
    )


def cell_additive_graph() -> CellResult:
    lam_path = abs(graph_gap(path(10)).subleading)
    lam_lolli = abs(graph_gap(lollipop(10, 3)).subleading)
    cert, d, margin = _design_error_certificate(lam_lolli, lam_path, 10)
    holds = not cert
    return CellResult(
        "additive_error", "graph", EXPECTED[("additive_error", "graph")], holds,
        f"lollipop lam={lam_lolli:.6f} > path lam={lam_path:.6f}; certified "
        f"at d={d} steps (log10 margin {margin:.2f})",
    )


def cell_mult_arbitrary() -> CellResult:
    eps_full = mult_error(hide_seek_C(5)).eps_m
    eps_cens = mult_error(hide_seek_Cprime(5)).eps_m
    holds = eps_cens >= eps_full - 1e-12
    return CellResult(
        "mult_error", "arbitrary", EXPECTED[("mult_error", "arbitrary")], holds,
        f"eps_M: {eps_full:.6f} -> {eps_cens:.6f} under interior deletion at d=1",
    )


def cell_mult_boundary(trials: int = 60, seed: int = 13) -> CellResult:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for arch, cens in _sweep_architectures(rng, trials, (3, 4), True):
        eps_full = mult_error(arch).eps_m
        eps_cens = mult_error(cens).eps_m
        worst = min(worst, eps_cens - eps_full)
    holds = worst >= -1e-9
    return CellResult(
        "mult_error", "boundary", EXPECTED[("mult_error", "boundary")], holds,
        f"{trials} random circuits: min eps_cens - eps_full = {worst:.3e}",
    )


def cell_mult_graph() -> CellResult:
    base = cell_additive_graph()
    return CellResult(
        "mult_error", "graph", EXPECTED[("mult_error", "graph")],
        base.observed_holds, "same sandwich certificate: " + base.evidence,
    )


def run_table1(trials: int = 60, seed: int = 11) -> list[CellResult]:
    return [
        cell_eigen_arbitrary(),
        cell_eigen_boundary(),
        cell_eigen_graph(),
        cell_singular_arbitrary(),
        cell_singular_boundary(trials=2 * trials, seed=seed),
        cell_singular_graph(),
        cell_additive_arbitrary(),
        cell_additive_boundary(trials=trials, seed=seed + 1),
        cell_additive_graph(),
        cell_mult_arbitrary(),
        cell_mult_boundary(trials=trials, seed=seed + 2),
        cell_mult_graph(),
    ]


def format_report(cells: list[CellResult]) -> str:
    lines = ["row              column     expected observed ok  evidence"]
    for c in cells:
        lines.append(
            f"{c.row:<16} {c.column:<10} "
            f"{'holds' if c.expected_holds else 'fails':<8} "
            f"{'holds' if c.observed_holds else 'fails':<8} "
            f"{'OK' if c.ok else 'MISMATCH':<3} {c.evidence}"
        )
    bad = sum(not c.ok for c in cells)
    lines.append(f"{len(cells) - bad}/{len(cells)} cells match the expected pattern")
    return "\n".join(lines)
