import numpy as np
import pytest

from momentgap.arch import ArchitectureError
from momentgap.graphs import (
    SiteGraph,
    find_lollipop_counterexample,
    graph_gap,
    graph_operator,
    lollipop,
    parse,
    path,
    serialize,
)
from momentgap.transfer import gate_transfer, gram_dense, spectra_match


class TestGraphType:
    def test_loop_rejected(self):
        with pytest.raises(ArchitectureError, match="loop"):
            SiteGraph(3, ((0, 0),))

    def test_duplicate_rejected(self):
        with pytest.raises(ArchitectureError, match="duplicate"):
            SiteGraph(3, ((0, 1), (1, 0)))

    def test_connectivity(self):
        assert path(5).connected
        assert not SiteGraph(3, ((0, 1),)).connected

    def test_roundtrip(self):
        g = lollipop(7, 4)
        assert parse(serialize(g)) == g


class TestBuilders:
    def test_path_edge_count(self):
        assert len(path(10).edges) == 9

    def test_lollipop_with_clique_two_is_path(self):
        assert lollipop(8, 2) == path(8)

    def test_lollipop_10_5_edge_count(self):
        assert len(lollipop(10, 5).edges) == 15

    def test_range_guards(self):
        with pytest.raises(ArchitectureError):
            lollipop(5, 6)
        with pytest.raises(ArchitectureError):
            lollipop(5, 1)


class TestOperator:
    def test_single_edge_equals_gate_projector(self):
        g = SiteGraph(2, ((0, 1),))
        m = graph_operator(g)
        np.testing.assert_allclose(
            m, gate_transfer([0, 1], [2, 2]).toarray(), atol=1e-14
        )
        eigs = np.sort(np.real(np.linalg.eigvals(m)))
        np.testing.assert_allclose(eigs, [0, 0, 1, 1], atol=1e-12)

    def test_gram_self_adjoint(self):
        g = lollipop(5, 3)
        m = graph_operator(g)
        gram = gram_dense((2,) * 5)
        assert np.max(np.abs(gram @ m - m.T @ gram)) < 1e-10 * np.max(gram)

    def test_disconnected_rejected(self):
        with pytest.raises(ArchitectureError, match="connected"):
            graph_operator(SiteGraph(3, ((0, 1),)))


class TestGap:
    def test_connected_path_has_positive_gap(self):
        r = graph_gap(path(3))
        assert r.gap > 0
        assert r.unit_multiplicity == 2

    def test_eigen_equals_singular(self):
        r = graph_gap(lollipop(6, 3))
        assert r.singular_subleading == pytest.approx(abs(r.subleading), abs=1e-12)

    def test_relabeling_preserves_spectrum(self, rng):
        g = lollipop(6, 4)
        perm = rng.permutation(6)
        relabeled = SiteGraph(
            6, tuple((int(perm[u]), int(perm[v])) for u, v in g.edges)
        )
        a = graph_gap(g)
        b = graph_gap(relabeled)
        assert spectra_match(a.deflated, b.deflated, tol=1e-10)

    def test_cycle_regression(self):
        # adding the endpoint edge to path(4): gap pinned after first run
        cyc = SiteGraph(4, ((0, 1), (1, 2), (2, 3), (0, 3)))
        assert graph_gap(path(4)).gap == pytest.approx(0.144771525017, abs=1e-10)
        assert graph_gap(cyc).gap == pytest.approx(0.217157287525, abs=1e-10)


class TestLollipopCounterexample:
    def test_more_edges_smaller_gap(self):
        k_star, gaps, base = find_lollipop_counterexample()
        assert k_star is not None
        assert gaps[k_star] < base
        # with raw gaps, every clique size in the sweep undercuts the path
        assert all(g < base for g in gaps.values())
