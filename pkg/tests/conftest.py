import numpy as np
import pytest

from momentgap.arch import Architecture, Gate


def random_architecture(rng, n_sites=None, max_gates=5, dims=(2,),
                        require_covered=True, arity=None, max_tries=200):
    """Random architecture for property sweeps; deterministic given rng."""
    for _ in range(max_tries):
        n = int(n_sites if n_sites is not None else rng.integers(1, 4))
        site_dims = tuple(int(rng.choice(dims)) for _ in range(n))
        gates = []
        for _ in range(int(rng.integers(1, max_gates + 1))):
            k = int(arity if arity is not None else rng.integers(1, n + 1))
            k = min(k, n)
            support = rng.choice(n, size=k, replace=False)
            gates.append(Gate(frozenset(int(s) for s in support)))
        arch = Architecture(site_dims, tuple(gates))
        if not require_covered or arch.covered:
            return arch
    raise RuntimeError("could not sample a covered architecture")


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)
