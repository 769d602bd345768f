"""Gate ensembles sampled from graph edges: one step applies a Haar gate on a
uniformly random edge, so the one-step moment operator is the edge average of
the per-edge projectors in the string basis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .arch import ArchitectureError
from .transfer import (
    SpectrumResult,
    _deflation_projector_dense,
    _kron_dense,
    _sqrt_2x2,
    gate_transfer,
)


@dataclass(frozen=True)
class SiteGraph:
    """Simple undirected graph over qudit sites."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ArchitectureError("graph needs at least one vertex")
        seen = set()
        norm = []
        for i, e in enumerate(self.edges):
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ArchitectureError(f"edges[{i}]: loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ArchitectureError(f"edges[{i}]: vertex outside [0, {self.n})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ArchitectureError(f"edges[{i}]: duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def connected(self) -> bool:
        if not self.edges and self.n > 1:
            return False
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        return len({find(i) for i in range(self.n)}) == 1


def path(n: int) -> SiteGraph:
    """Path graph 0-1-2-...-(n-1)."""
    if n < 2:
        raise ArchitectureError(f"path needs n >= 2, got {n}")
    return SiteGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def lollipop(n: int, k: int) -> SiteGraph:
    """Path on n vertices plus all missing edges among the first k vertices."""
    if not 2 <= k <= n:
        raise ArchitectureError(f"lollipop needs 2 <= k <= n, got k={k}, n={n}")
    edges = list(path(n).edges)
    have = set(edges)
    for u in range(k):
        for v in range(u + 1, k):
            if (u, v) not in have:
                edges.append((u, v))
    return SiteGraph(n, tuple(edges))


def graph_operator(graph: SiteGraph, q: int = 2) -> np.ndarray:
    """Edge-averaged moment operator (1/|E|) sum of per-edge projectors,
    dense in the string basis; self-adjoint in the Gram metric."""
    if not graph.connected:
        raise ArchitectureError("graph gap requires a connected graph")
    dims = (q,) * graph.n
    dim = 1 << graph.n
    out = np.zeros((dim, dim))
    for u, v in graph.edges:
        out += gate_transfer([u, v], dims).toarray()
    out /= len(graph.edges)
    return out


def graph_gap(graph: SiteGraph, q: int = 2) -> SpectrumResult:
    """Spectral gap of the edge-averaged operator after fixed-space deflation.

    The operator is Gram-self-adjoint, so the eigenvalue and singular gaps
    coincide; both are reported from one symmetric solve.
    """
    m = graph_operator(graph, q)
    dims = (q,) * graph.n
    q_mat = _deflation_projector_dense(dims)
    defl = q_mat @ m @ q_mat
    root = _kron_dense([_sqrt_2x2(q)[0] for q in dims])
    inv_root = _kron_dense([_sqrt_2x2(q)[1] for q in dims])
    sym = root @ defl @ inv_root
    sym = 0.5 * (sym + sym.T)
    eigs = scipy.linalg.eigvalsh(sym)
    full_sym = root @ m @ inv_root
    full_eigs = scipy.linalg.eigvalsh(0.5 * (full_sym + full_sym.T))
    order = np.argsort(-np.abs(full_eigs))
    full_sorted = full_eigs[order].astype(complex)
    dorder = np.argsort(-np.abs(eigs))
    defl_sorted = eigs[dorder].astype(complex)
    subleading = complex(defl_sorted[0])
    unit_mult = int(np.sum(np.abs(full_eigs - 1.0) <= 1e-9))
    return SpectrumResult(
        eigenvalues=full_sorted,
        unit_multiplicity=unit_mult,
        subleading=subleading,
        gap=1.0 - abs(subleading),
        deflated=defl_sorted,
        singular_subleading=abs(subleading),
        subleading_vector=None,
        method="dense",
    )


def find_lollipop_counterexample(
    n: int = 10, k_range: Sequence[int] = range(3, 8), q: int = 2
) -> tuple[int | None, dict[int, float], float]:
    """Sweep clique sizes; return the first k whose lollipop gap drops below the
    path gap, the per-k gaps, and the path gap."""
    base = graph_gap(path(n), q).gap
    gaps = {}
    best = None
    for k in k_range:
        gaps[k] = graph_gap(lollipop(n, k), q).gap
        if best is None and gaps[k] < base:
            best = k
    return best, gaps, base


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

def to_document(graph: SiteGraph) -> dict:
    return {"n": graph.n, "edges": [list(e) for e in graph.edges]}


def serialize(graph: SiteGraph) -> str:
    return json.dumps(to_document(graph), indent=2)


def from_document(doc: Mapping) -> SiteGraph:
    try:
        return SiteGraph(int(doc["n"]), tuple(tuple(e) for e in doc["edges"]))
    except KeyError as exc:
        raise ArchitectureError(f"graph document missing field {exc}")


def parse(text: str) -> SiteGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArchitectureError(f"malformed JSON: {exc}") from exc
    return from_document(doc)
