"""Second-moment transfer operators in the non-orthogonal {I,S} product basis.

Basis strings are indexed by integers in [0, 2^N); bit i of the index is the
letter at site i (0 = identity, 1 = two-copy swap).  Every Haar gate acts on
this 2^N-dimensional space as a projector that is orthogonal with respect to
the Gram metric of the basis, and the circuit's relevant spectrum is read off
the ordered product of these projectors.

Also provides a dense 16^N oracle that builds the full superoperator of the
two-copy channel gate by gate; it is used only to cross-check the string-basis
engine in tests.  Dense-oracle vectors use site-major axes of dimension
q_i^4 = (ket pair, bra pair) per site.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .arch import Architecture, ArchitectureError

DENSE_TOL = 1e-12
ITERATIVE_TOL = 1e-8
UNIT_TOL = 1e-9


class SolverError(RuntimeError):
    """Iterative eigensolver failed to converge."""


# ---------------------------------------------------------------------------
# Gram metric
# ---------------------------------------------------------------------------

def gram_entry(sigma: int | Sequence[str], tau: int | Sequence[str],
               site_dims: Sequence[int]) -> float:
    """Inner product of two basis strings: prod over sites of q_i^2 if the
    letters agree and q_i otherwise.

    Strings may be given as bit-indexed integers or as sequences over
    {'I','S'}.
    """
    n = len(site_dims)
    si = _as_index(sigma, n)
    ti = _as_index(tau, n)
    out = 1.0
    diff = si ^ ti
    for i, q in enumerate(site_dims):
        out *= q if (diff >> i) & 1 else q * q
    return out


def _as_index(s, n: int) -> int:
    if isinstance(s, (int, np.integer)):
        idx = int(s)
        if not 0 <= idx < (1 << n):
            raise ValueError(f"string index {idx} outside [0, 2^{n})")
        return idx
    word = list(s)
    if len(word) != n:
        raise ValueError(f"string length {len(word)} != site count {n}")
    idx = 0
    for i, letter in enumerate(word):
        if letter not in ("I", "S"):
            raise ValueError(f"letter {letter!r} not in {{I, S}}")
        if letter == "S":
            idx |= 1 << i
    return idx


def gram_factors(site_dims: Sequence[int]) -> list[np.ndarray]:
    """Per-site 2x2 Gram factors; the full Gram matrix is their Kronecker product."""
    return [np.array([[q * q, q], [q, q * q]], float) for q in site_dims]


def _kron_matvec(factors: list[np.ndarray], v: np.ndarray) -> np.ndarray:
    """Apply a Kronecker product of 2x2 matrices (site 0 = fastest axis)."""
    n = len(factors)
    x = v.reshape((2,) * n)
    # axis n-1-i corresponds to site i under bit-indexed reshape
    for i, m in enumerate(factors):
        x = np.tensordot(m, x, axes=(1, n - 1 - i))
        x = np.moveaxis(x, 0, n - 1 - i)
    return x.reshape(-1)


def _kron_dense(factors: list[np.ndarray]) -> np.ndarray:
    """Dense Kronecker product with factors[i] acting on site i (site 0 = LSB)."""
    out = factors[-1]
    for f in reversed(factors[:-1]):
        out = np.kron(out, f)
    return out


def gram_matvec(site_dims: Sequence[int], v: np.ndarray) -> np.ndarray:
    return _kron_matvec(gram_factors(site_dims), v)


def _sqrt_2x2(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Square root and inverse square root of [[q^2, q], [q, q^2]]."""
    a = np.sqrt(q * q + q)
    b = np.sqrt(q * q - q)
    u, w = (a + b) / 2.0, (a - b) / 2.0
    root = np.array([[u, w], [w, u]])
    ui, wi = (1 / a + 1 / b) / 2.0, (1 / a - 1 / b) / 2.0
    inv_root = np.array([[ui, wi], [wi, ui]])
    return root, inv_root


def gram_sqrt_matvec(site_dims: Sequence[int], v: np.ndarray,
                     inverse: bool = False) -> np.ndarray:
    factors = [_sqrt_2x2(q)[1 if inverse else 0] for q in site_dims]
    return _kron_matvec(factors, v)


# ---------------------------------------------------------------------------
# Per-gate projectors
# ---------------------------------------------------------------------------

def gate_transfer(support: Iterable[int], site_dims: Sequence[int]) -> sp.csc_matrix:
    """Matrix of the Gram-orthogonal projector onto strings constant on ``support``.

    Strings already constant on the support are fixed; a mixed string maps to
    a combination of the two constant completions, with coefficients solving
    the 2x2 Gram system on the support.  Every column has at most two nonzero
    entries.
    """
    support = sorted(set(int(s) for s in support))
    if not support:
        raise ArchitectureError("empty support")
    n = len(site_dims)
    if support[-1] >= n or support[0] < 0:
        raise ArchitectureError(f"support {support} outside [0, {n})")
    dim = 1 << n
    mask = 0
    for s in support:
        mask |= 1 << s

    idx = np.arange(dim, dtype=np.int64)
    sub = idx & mask
    is_const = (sub == 0) | (sub == mask)

    # Overlaps of each column string with the I- and S-constant completions,
    # restricted to the support: products of q_i or q_i^2 per site.
    r_i = np.ones(dim)
    r_s = np.ones(dim)
    d_sup = 1.0
    for s in support:
        q = float(site_dims[s])
        bit = ((idx >> s) & 1).astype(bool)
        r_i *= np.where(bit, q, q * q)
        r_s *= np.where(bit, q * q, q)
        d_sup *= q

    # [[D^2, D], [D, D^2]] c = (r_i, r_s), written to avoid large-power loss
    denom = d_sup * d_sup - 1.0
    c_i = (r_i - r_s / d_sup) / denom
    c_s = (r_s - r_i / d_sup) / denom

    cols_const = idx[is_const]
    cols_mixed = idx[~is_const]
    rows = np.concatenate([cols_const, cols_mixed & ~mask, cols_mixed | mask])
    cols = np.concatenate([cols_const, cols_mixed, cols_mixed])
    vals = np.concatenate(
        [np.ones(cols_const.size), c_i[cols_mixed], c_s[cols_mixed]]
    )
    return sp.csc_matrix((vals, (rows, cols)), shape=(dim, dim))


def circuit_transfer_matrices(arch: Architecture) -> list[sp.csc_matrix]:
    """Per-gate projector matrices for one period, in application order."""
    return [gate_transfer(g.support, arch.site_dims) for g in arch.gates]


@dataclass
class TransferOperator:
    """A circuit's transfer operator: ordered per-gate projectors over one
    period, with the Gram metric carried implicitly by the entry formula."""

    per_gate: list[sp.csc_matrix]
    site_dims: tuple[int, ...]

    @classmethod
    def build(cls, arch: Architecture) -> "TransferOperator":
        return cls(circuit_transfer_matrices(arch), tuple(arch.site_dims))

    def gram(self, sigma: int, tau: int) -> float:
        return gram_entry(sigma, tau, self.site_dims)

    def apply(self, v: np.ndarray, periods: int = 1) -> np.ndarray:
        out = np.asarray(v, dtype=float)
        for _ in range(periods):
            for m in self.per_gate:
                out = m @ out
        return out

    def validate(self, tol: float = 1e-12) -> None:
        """Check idempotence, Gram self-adjointness, and column sparsity of
        every per-gate matrix."""
        g = gram_dense(self.site_dims)
        scale = np.max(g)
        for k, p in enumerate(self.per_gate):
            dense = p.toarray()
            if np.max(np.abs(dense @ dense - dense)) > tol:
                raise ArchitectureError(f"per_gate[{k}] is not idempotent")
            if np.max(np.abs(g @ dense - dense.T @ g)) > tol * scale:
                raise ArchitectureError(f"per_gate[{k}] not Gram self-adjoint")
            if np.diff(p.tocsc().indptr).max() > 2:
                raise ArchitectureError(f"per_gate[{k}] has a dense column")


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass
class SpectrumResult:
    """Eigen data of a circuit's transfer product.

    ``eigenvalues`` holds the computed eigenvalues sorted by descending
    modulus: the full spectrum in dense mode, the leading few in iterative
    mode.  ``subleading`` is a maximal-modulus eigenvalue outside the
    two-dimensional fixed space (full multiset retained in ``deflated``).
    """

    eigenvalues: np.ndarray
    unit_multiplicity: int
    subleading: complex
    gap: float
    deflated: np.ndarray
    singular_subleading: float | None = None
    subleading_vector: np.ndarray | None = None
    method: str = "dense"


def _fixed_space_rows(site_dims) -> np.ndarray:
    """2 x 2^N block: Gram rows of the all-I and all-S strings.

    Row k of the G-orthogonal projector onto the fixed space is recovered as
    gram2^-1 @ rows, so projecting costs two dot products per vector.
    """
    n = len(site_dims)
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    row_i = np.ones(dim)
    row_s = np.ones(dim)
    for i, q in enumerate(site_dims):
        bit = ((idx >> i) & 1).astype(bool)
        row_i *= np.where(bit, q, q * q)
        row_s *= np.where(bit, q * q, q)
    prod_q = float(np.prod([float(q) for q in site_dims]))
    gram2 = np.array([[prod_q**2, prod_q], [prod_q, prod_q**2]])
    return np.linalg.solve(gram2, np.stack([row_i, row_s]))


def _deflation_projector_dense(site_dims) -> np.ndarray:
    """Dense Q = I - (G-orthogonal projector onto the fixed space)."""
    dim = 1 << len(site_dims)
    coef_rows = _fixed_space_rows(site_dims)
    q_mat = np.eye(dim)
    q_mat[0, :] -= coef_rows[0]
    q_mat[dim - 1, :] -= coef_rows[1]
    return q_mat


def circuit_spectrum(
    arch: Architecture,
    *,
    periods: int | None = None,
    method: str = "auto",
    want_singular: bool = False,
    want_vector: bool = False,
    k: int = 6,
) -> SpectrumResult:
    """Spectrum of the ordered product of per-gate projectors, with the global
    fixed space deflated.

    Multi-period eigenvalues are obtained by powering one-period eigenvalues;
    singular values for d > 1 replay the product instead, since singular
    values of a power are not powers of singular values.
    """
    if not arch.covered:
        touched = set()
        for g in arch.gates:
            touched |= g.support
        missing = sorted(set(range(arch.n)) - touched)
        raise ArchitectureError(f"gap undefined: uncovered site {missing[0]}")
    d = arch.repeat if periods is None else int(periods)
    n = arch.n
    dim = 1 << n
    if method == "auto":
        method = "dense" if n <= 11 else "iterative"

    mats = circuit_transfer_matrices(arch)
    if method == "dense":
        return _spectrum_dense(arch, mats, d, want_singular, want_vector)
    return _spectrum_iterative(arch, mats, d, want_singular, want_vector, k)


def _spectrum_dense(arch, mats, d, want_singular, want_vector):
    dims = arch.site_dims
    dim = 1 << arch.n
    t = np.eye(dim)
    for m in mats:
        t = m @ t
    full_eigs = np.linalg.eigvals(t)
    if d > 1:
        full_eigs = full_eigs**d
    order = np.argsort(-np.abs(full_eigs))
    full_eigs = full_eigs[order]
    unit_mult = int(np.sum(np.abs(full_eigs - 1.0) <= UNIT_TOL))

    q_mat = _deflation_projector_dense(dims)
    t_defl = q_mat @ t @ q_mat
    if want_vector:
        defl_eigs, vecs = scipy.linalg.eig(t_defl)
    else:
        defl_eigs = np.linalg.eigvals(t_defl)
        vecs = None
    if d > 1:
        defl_eigs = defl_eigs**d
    dorder = np.argsort(-np.abs(defl_eigs))
    defl_sorted = defl_eigs[dorder]
    subleading = complex(defl_sorted[0])
    vector = None
    if want_vector and vecs is not None:
        vector = vecs[:, dorder[0]]
        if np.max(np.abs(vector.imag)) <= 1e-12:
            vector = vector.real

    singular = None
    if want_singular:
        td = t_defl if d == 1 else np.linalg.matrix_power(t_defl, d)
        root = _kron_dense([_sqrt_2x2(q)[0] for q in dims])
        inv_root = _kron_dense([_sqrt_2x2(q)[1] for q in dims])
        singular = float(scipy.linalg.svdvals(root @ td @ inv_root)[0])

    return SpectrumResult(
        eigenvalues=full_eigs,
        unit_multiplicity=unit_mult,
        subleading=subleading,
        gap=1.0 - abs(subleading),
        deflated=defl_sorted,
        singular_subleading=singular,
        subleading_vector=vector,
        method="dense",
    )


def _spectrum_iterative(arch, mats, d, want_singular, want_vector, k):
    dims = arch.site_dims
    dim = 1 << arch.n
    coef_rows = _fixed_space_rows(dims)
    last = dim - 1

    def t_apply(v):
        out = v
        for m in mats:
            out = m @ out
        return out

    def q_apply(v):
        a, b = coef_rows @ v
        out = v.copy()
        out[0] -= a
        out[last] -= b
        return out

    def defl_apply(v):
        return q_apply(t_apply(q_apply(v)))

    kk = max(2, min(k, dim - 3))
    op = spla.LinearOperator((dim, dim), matvec=defl_apply, dtype=float)
    try:
        defl_eigs, vecs = spla.eigs(op, k=kk, which="LM", tol=ITERATIVE_TOL,
                                    maxiter=5000)
    except spla.ArpackNoConvergence as exc:
        raise SolverError(
            f"eigensolver did not converge: {exc}; "
            f"partial eigenvalues {getattr(exc, 'eigenvalues', None)}"
        ) from exc
    order = np.argsort(-np.abs(defl_eigs))
    defl_sorted = defl_eigs[order] ** d if d > 1 else defl_eigs[order]
    subleading = complex(defl_sorted[0])
    vector = None
    if want_vector:
        vector = vecs[:, order[0]]
        if np.max(np.abs(vector.imag)) <= 1e-12:
            vector = vector.real

    full_op = spla.LinearOperator((dim, dim), matvec=t_apply, dtype=float)
    try:
        top_eigs = spla.eigs(full_op, k=kk, which="LM", tol=ITERATIVE_TOL,
                             maxiter=5000, return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        raise SolverError(f"eigensolver did not converge: {exc}") from exc
    top_eigs = top_eigs[np.argsort(-np.abs(top_eigs))]
    unit_mult = int(np.sum(np.abs(top_eigs - 1.0) <= 1e-7))
    if d > 1:
        top_eigs = top_eigs**d

    singular = None
    if want_singular:
        def qt_apply(v):
            # transpose of q_apply: v - coef_rows^T (v[0], v[last])
            return v - coef_rows[0] * v[0] - coef_rows[1] * v[last]

        def sym_apply(v):
            x = gram_sqrt_matvec(dims, v, inverse=True)
            for _ in range(d):
                x = defl_apply(x)
            return gram_sqrt_matvec(dims, x)

        def sym_t_apply(v):
            x = gram_sqrt_matvec(dims, v)
            for _ in range(d):
                x = qt_apply(x)
                for m in reversed(mats):
                    x = m.T @ x
                x = qt_apply(x)
            return gram_sqrt_matvec(dims, x, inverse=True)

        ata = spla.LinearOperator(
            (dim, dim), matvec=lambda v: sym_t_apply(sym_apply(v)), dtype=float
        )
        try:
            vals = spla.eigsh(ata, k=1, which="LA", tol=ITERATIVE_TOL,
                              maxiter=5000, return_eigenvectors=False)
        except spla.ArpackNoConvergence as exc:
            raise SolverError(f"singular solver did not converge: {exc}") from exc
        singular = float(np.sqrt(max(vals[0], 0.0)))

    return SpectrumResult(
        eigenvalues=top_eigs,
        unit_multiplicity=unit_mult,
        subleading=subleading,
        gap=1.0 - abs(subleading),
        deflated=defl_sorted,
        singular_subleading=singular,
        subleading_vector=vector,
        method="iterative",
    )


# ---------------------------------------------------------------------------
# Dense 16^N oracle
# ---------------------------------------------------------------------------

def _vec_basis_site(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized identity and two-copy swap on one site, as q^4 vectors."""
    qq = q * q
    ident = np.eye(qq).reshape(-1)
    swap = np.zeros((q, q, q, q))
    for a in range(q):
        for b in range(q):
            swap[b, a, a, b] = 1.0  # SWAP |a,b> = |b,a>
    swap = swap.reshape(qq, qq).reshape(-1)
    return ident, swap


def _small_twirl_projector(support, site_dims) -> np.ndarray:
    """Dense twirl projector on the support legs only."""
    support = sorted(set(int(s) for s in support))
    i_full = np.ones(1)
    s_full = np.ones(1)
    m = 1.0
    for s in support:
        iv, sv = _vec_basis_site(site_dims[s])
        i_full = np.kron(i_full, iv)
        s_full = np.kron(s_full, sv)
        m *= site_dims[s]
    gram2 = np.array([[m * m, m], [m, m * m]])
    basis = np.stack([i_full, s_full])  # 2 x L
    return basis.T @ np.linalg.inv(gram2) @ basis


def apply_gate_superop_dense(block: np.ndarray, support, site_dims) -> np.ndarray:
    """Apply one gate's dense twirl to the rows of a (16^N, cols) block."""
    support = sorted(set(int(s) for s in support))
    n = len(site_dims)
    leg_dims = [q**4 for q in site_dims]
    cols = block.shape[1] if block.ndim == 2 else 1
    p_small = _small_twirl_projector(support, site_dims)
    x = block.reshape(leg_dims + [cols])
    x = np.moveaxis(x, support, range(len(support)))
    lead = x.shape[:len(support)]
    rest = x.shape[len(support):]
    x = p_small @ x.reshape(p_small.shape[0], -1)
    x = np.moveaxis(x.reshape(lead + rest), range(len(support)), support)
    return x.reshape(block.shape)


def dense_gate_superop(support: Iterable[int], site_dims: Sequence[int]) -> np.ndarray:
    """Dense two-copy twirl of one gate on the full 16^N-dimensional space."""
    support = sorted(set(int(s) for s in support))
    n = len(site_dims)
    leg_dims = [q**4 for q in site_dims]
    total = int(np.prod(leg_dims))
    p_small = _small_twirl_projector(support, site_dims)
    rest = [i for i in range(n) if i not in support]
    rest_dim = int(np.prod([leg_dims[i] for i in rest])) if rest else 1
    full = np.kron(p_small, np.eye(rest_dim))
    # reorder legs from (support..., rest...) to site order, rows and columns
    order = support + rest
    perm = np.argsort(order)
    shape = [leg_dims[i] for i in order]
    tensor = full.reshape(shape + shape)
    axes = list(perm) + [n + p for p in perm]
    return tensor.transpose(axes).reshape(total, total)


def dense_moment_oracle(arch: Architecture, periods: int | None = None) -> np.ndarray:
    """Full superoperator of the circuit's two-copy channel, built gate by gate
    from explicit twirl formulas.  Guarded to N <= 3 with qubit sites.
    """
    if arch.n > 3 or any(q != 2 for q in arch.site_dims):
        raise ArchitectureError(
            f"dense oracle limited to N <= 3 qubit sites, got dims {arch.site_dims}"
        )
    d = arch.repeat if periods is None else int(periods)
    total = 16**arch.n
    out = np.eye(total)
    for gate in arch.gates:
        out = apply_gate_superop_dense(out, gate.support, arch.site_dims)
    if d > 1:
        out = np.linalg.matrix_power(out, d)
    return out


def _embedded_image_basis(support, site_dims) -> np.ndarray:
    """Orthonormal basis of a gate twirl's image: the orthonormalized span of
    the two constant strings on the support, tensored with everything else."""
    support = sorted(set(int(s) for s in support))
    n = len(site_dims)
    legs = [q**4 for q in site_dims]
    i_full = np.ones(1)
    s_full = np.ones(1)
    for s in support:
        iv, sv = _vec_basis_site(site_dims[s])
        i_full = np.kron(i_full, iv)
        s_full = np.kron(s_full, sv)
    q_mat, _ = np.linalg.qr(np.stack([i_full, s_full], axis=1))
    rest = [i for i in range(n) if i not in support]
    rest_dim = int(np.prod([legs[i] for i in rest])) if rest else 1
    v = np.kron(q_mat, np.eye(rest_dim))
    order = support + rest
    perm = np.argsort(order)
    shape = [legs[i] for i in order]
    v = v.reshape(shape + [2 * rest_dim])
    v = v.transpose(list(perm) + [n])
    total = int(np.prod(legs))
    return v.reshape(total, 2 * rest_dim)


def dense_nonzero_spectrum(arch: Architecture, cutoff: float = 1e-8) -> np.ndarray:
    """Nonzero spectrum of the dense 16^N moment operator, via compression.

    The first gate's twirl is an orthogonal projector V V*, and the nonzero
    spectrum of a cyclic product is invariant under rotation, so the product
    compresses to the small matrix V* (M_k ... M_2) V on the first gate's
    image.  Self-validating: the projector factorization is checked before
    use.  Still guarded to N <= 3 qubit sites.
    """
    if arch.n > 3 or any(q != 2 for q in arch.site_dims):
        raise ArchitectureError(
            f"dense oracle limited to N <= 3 qubit sites, got dims {arch.site_dims}"
        )
    gates = arch.expanded_gates()
    if not gates:
        raise ArchitectureError("empty architecture")
    v = _embedded_image_basis(gates[0].support, arch.site_dims)
    first = dense_gate_superop(gates[0].support, arch.site_dims)
    if not np.allclose(v @ v.T, first, atol=1e-10):
        raise ArchitectureError("first twirl is not an orthogonal projector")
    y = v
    for gate in gates[1:]:
        y = apply_gate_superop_dense(y, gate.support, arch.site_dims)
    small = v.T @ y
    eigs = np.linalg.eigvals(small)
    eigs = eigs[np.abs(eigs) > cutoff]
    order = np.lexsort((np.angle(eigs), -np.abs(eigs)))
    return eigs[order]


def gram_dense(site_dims: Sequence[int]) -> np.ndarray:
    """Dense Gram matrix of the string basis (Kronecker of per-site factors)."""
    return _kron_dense(gram_factors(site_dims))


def nonzero_spectrum(matrix: np.ndarray, cutoff: float = 1e-8) -> np.ndarray:
    """Eigenvalues with modulus above ``cutoff``, sorted by (-|z|, angle)."""
    eigs = np.linalg.eigvals(matrix)
    eigs = eigs[np.abs(eigs) > cutoff]
    order = np.lexsort((np.angle(eigs), -np.abs(eigs)))
    return eigs[order]


def spectra_match(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Compare two eigenvalue multisets after greedy pairing."""
    if a.size != b.size:
        return False
    rem = list(b)
    for z in a:
        dists = [abs(z - w) for w in rem]
        j = int(np.argmin(dists))
        if dists[j] > tol:
            return False
        rem.pop(j)
    return True
