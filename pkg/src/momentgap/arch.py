"""Circuit architectures: ordered Haar-gate supports over qudit sites.

An :class:`Architecture` is one period of a circuit, applied ``repeat`` times.
Sites are 0-indexed.  Gates carry no parameters; every gate is understood as a
Haar-random unitary on its support, so an architecture is purely combinatorial
data plus the per-site local dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class ArchitectureError(ValueError):
    """An architecture document violates a structural invariant."""


@dataclass(frozen=True)
class Gate:
    """A Haar-random gate acting on a set of sites."""

    support: frozenset[int]
    label: str | None = None

    def __post_init__(self):
        try:
            support = frozenset(int(s) for s in self.support)
        except (TypeError, ValueError):
            raise ArchitectureError("gate support must contain integers")
        if len(support) != len(tuple(self.support)):
            raise ArchitectureError("duplicate site in support")
        object.__setattr__(self, "support", support)
        if not self.support:
            raise ArchitectureError("gate support must be non-empty")
        if any(s < 0 for s in self.support):
            raise ArchitectureError("gate support must contain non-negative integers")

    def sorted_support(self) -> tuple[int, ...]:
        return tuple(sorted(self.support))


@dataclass(frozen=True)
class Architecture:
    """One period of a circuit: local dimensions, ordered gates, repetition count.

    Immutable after construction; safe to share across threads.
    """

    site_dims: tuple[int, ...]
    gates: tuple[Gate, ...]
    repeat: int = 1

    def __post_init__(self):
        object.__setattr__(self, "site_dims", tuple(int(q) for q in self.site_dims))
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n < 1:
            raise ArchitectureError("site_dims: need at least one site")
        for i, q in enumerate(self.site_dims):
            if q < 2:
                raise ArchitectureError(f"site_dims[{i}]: local dimension {q} < 2")
        if self.repeat < 1:
            raise ArchitectureError(f"repeat: {self.repeat} < 1")
        for g, gate in enumerate(self.gates):
            for s in gate.support:
                if not 0 <= s < self.n:
                    raise ArchitectureError(
                        f"gates[{g}].support: site {s} outside [0, {self.n})"
                    )

    @property
    def n(self) -> int:
        return len(self.site_dims)

    @property
    def covered(self) -> bool:
        """True iff every site appears in at least one gate support."""
        touched: set[int] = set()
        for gate in self.gates:
            touched |= gate.support
        return touched == set(range(self.n))

    @property
    def connected(self) -> bool:
        """True iff the hypergraph of gate supports links all sites."""
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gate in self.gates:
            it = iter(gate.support)
            root = find(next(it))
            for s in it:
                parent[find(s)] = root
        return len({find(i) for i in range(self.n)}) == 1

    @property
    def uniform_dim(self) -> int:
        """The common local dimension; raises if sites are heterogeneous."""
        qs = set(self.site_dims)
        if len(qs) != 1:
            raise ArchitectureError(f"heterogeneous local dimensions {self.site_dims}")
        return qs.pop()

    def expanded_gates(self, periods: int | None = None) -> tuple[Gate, ...]:
        """Gate list replayed over ``periods`` periods (defaults to ``repeat``)."""
        d = self.repeat if periods is None else periods
        return self.gates * d

    def with_repeat(self, repeat: int) -> "Architecture":
        return Architecture(self.site_dims, self.gates, repeat)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def hide_seek_C(n: int, q: int = 2, repeat: int = 1) -> Architecture:
    """Five-gate period on ``n`` sites: two big gates sandwich a pair gate twice.

    Supports (0-indexed): {1..n-1}, {0,1}, {0,2..n-1}, {0,1}, {1..n-1}.
    The pair gates on {0,1} shelter site 0 from the wide mixer in the middle.
    """
    if n < 3:
        raise ArchitectureError(f"hide_seek_C needs n >= 3, got {n}")
    back = frozenset(range(1, n))
    pair = frozenset({0, 1})
    front = frozenset({0} | set(range(2, n)))
    gates = (
        Gate(back, "U1"),
        Gate(pair, "U2"),
        Gate(front, "U3"),
        Gate(pair, "U4"),
        Gate(back, "U5"),
    )
    return Architecture((q,) * n, gates, repeat)


def hide_seek_Cprime(n: int, q: int = 2, repeat: int = 1) -> Architecture:
    """The hide_seek_C period with both {0,1} pair gates removed."""
    return censor(hide_seek_C(n, q, repeat), {1, 3})


def brickwork3(q1: int, q2: int, q3: int, repeat: int = 1) -> Architecture:
    """Three sites with dims (q1, q2, q3) and gates {0,1}, {1,2}, {0,1}."""
    gates = (Gate(frozenset({0, 1})), Gate(frozenset({1, 2})), Gate(frozenset({0, 1})))
    return Architecture((q1, q2, q3), gates, repeat)


def brickwork1d(n: int, q: int = 2, repeat: int = 1) -> Architecture:
    """One period of the 1D brickwork: even bonds, then odd bonds."""
    if n < 2:
        raise ArchitectureError(f"brickwork1d needs n >= 2, got {n}")
    gates = [Gate(frozenset({i, i + 1})) for i in range(0, n - 1, 2)]
    gates += [Gate(frozenset({i, i + 1})) for i in range(1, n - 1, 2)]
    return Architecture((q,) * n, tuple(gates), repeat)


def path_sequence(n: int, q: int = 2, repeat: int = 1) -> Architecture:
    """Nearest-neighbour gates applied left to right: {0,1}, {1,2}, ..."""
    if n < 2:
        raise ArchitectureError(f"path_sequence needs n >= 2, got {n}")
    gates = tuple(Gate(frozenset({i, i + 1})) for i in range(n - 1))
    return Architecture((q,) * n, gates, repeat)


_BUILDERS = {
    "hide_seek_C": hide_seek_C,
    "hide_seek_Cprime": hide_seek_Cprime,
    "brickwork3": brickwork3,
    "brickwork1d": brickwork1d,
    "path_sequence": path_sequence,
}


def builder_names() -> tuple[str, ...]:
    return tuple(_BUILDERS)


def build_named(name: str, params: Mapping) -> Architecture:
    """Construct a named architecture from a parameter map.

    ``params`` carries ``N`` (and ``q``, ``repeat``) for the hide_seek /
    brickwork1d / path_sequence families, or ``Q1, Q2, Q3`` for brickwork3.
    """
    if name not in _BUILDERS:
        raise ArchitectureError(
            f"unknown builder {name!r}; known: {', '.join(sorted(_BUILDERS))}"
        )
    p = dict(params)
    repeat = int(p.pop("repeat", 1))
    if name == "brickwork3":
        try:
            dims = (int(p["Q1"]), int(p["Q2"]), int(p["Q3"]))
        except KeyError as exc:
            raise ArchitectureError(f"brickwork3 requires Q1, Q2, Q3; missing {exc}")
        return brickwork3(*dims, repeat=repeat)
    try:
        n = int(p["N"])
    except KeyError:
        raise ArchitectureError(f"builder {name!r} requires N")
    q = int(p.get("q", 2))
    return _BUILDERS[name](n, q, repeat)


# ---------------------------------------------------------------------------
# Censoring transformations
# ---------------------------------------------------------------------------

def censor(arch: Architecture, gate_indices: Iterable[int]) -> Architecture:
    """Remove the given gate positions from each period, preserving order."""
    drop = set(gate_indices)
    for i in drop:
        if not 0 <= i < len(arch.gates):
            raise ArchitectureError(
                f"censor index {i} outside gate list of length {len(arch.gates)}"
            )
    kept = tuple(g for i, g in enumerate(arch.gates) if i not in drop)
    return Architecture(arch.site_dims, kept, arch.repeat)


def cyclic_shift(arch: Architecture, k: int) -> Architecture:
    """Rotate one period's gate list left by ``k``; the spectrum is unchanged."""
    m = len(arch.gates)
    if m == 0:
        if k != 0:
            raise ArchitectureError("cyclic_shift on empty gate list")
        return arch
    if not 0 <= k < m:
        raise ArchitectureError(f"cyclic_shift by {k} outside [0, {m})")
    gates = arch.gates[k:] + arch.gates[:k]
    return Architecture(arch.site_dims, gates, arch.repeat)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

def to_document(arch: Architecture) -> dict:
    doc = {
        "site_dims": list(arch.site_dims),
        "gates": [
            {"support": list(g.sorted_support())}
            | ({"label": g.label} if g.label else {})
            for g in arch.gates
        ],
        "repeat": arch.repeat,
    }
    return doc


def serialize(arch: Architecture) -> str:
    """Architecture as a UTF-8 JSON document (gate order = application order)."""
    return json.dumps(to_document(arch), indent=2)


def from_document(doc: Mapping) -> Architecture:
    if not isinstance(doc, Mapping):
        raise ArchitectureError("document root must be an object")
    try:
        site_dims = doc["site_dims"]
        gate_docs = doc["gates"]
    except KeyError as exc:
        raise ArchitectureError(f"missing required field {exc}")
    if not isinstance(site_dims, (list, tuple)) or not site_dims:
        raise ArchitectureError("site_dims: must be a non-empty list")
    gates = []
    for i, gdoc in enumerate(gate_docs):
        if not isinstance(gdoc, Mapping) or "support" not in gdoc:
            raise ArchitectureError(f"gates[{i}]: missing support")
        support = gdoc["support"]
        if len(set(support)) != len(support):
            raise ArchitectureError(f"gates[{i}].support: duplicate site in support")
        gates.append(Gate(frozenset(int(s) for s in support), gdoc.get("label")))
    repeat = int(doc.get("repeat", 1))
    return Architecture(tuple(int(q) for q in site_dims), tuple(gates), repeat)


def parse(text: str) -> Architecture:
    """Parse the JSON architecture format; reports invariant violations by field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArchitectureError(f"malformed JSON: {exc}") from exc
    return from_document(doc)
