import io
import math

import numpy as np
import pytest

from spindex.graph import (
    Graph,
    GraphError,
    ParseError,
    edge_sum,
    ka1_index,
    load_edge_list,
    mso_index,
    parse_index,
    reciprocal_randic,
    sp_index,
    write_edge_list,
    zagreb_m1,
)
from spindex.means import LIM0, LIM1, NEG_INF, POS_INF, ParameterError
from spindex.random_models import ErParams, SeededStream, gen_er

K4 = Graph.complete(4)
P3 = Graph.path(3)
STAR3 = Graph.star(3)
EMPTY = Graph.from_edges(5, [])


def er_sample(count=40, seed=7):
    rng = np.random.default_rng(seed)
    for j in range(count):
        n = int(rng.integers(2, 101))
        p = float(rng.choice([0.03, 0.1, 0.3, 0.7]))
        yield gen_er(ErParams(n, p), SeededStream(seed, j))


class TestGraph:
    def test_degrees(self):
        assert P3.degrees.tolist() == [1, 2, 1]
        assert K4.degrees.tolist() == [3, 3, 3, 3]
        assert int(K4.degrees.sum()) == 2 * K4.m

    @pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)], [(-1, 2)]])
    def test_invalid(self, edges):
        with pytest.raises(GraphError):
            Graph.from_edges(3, edges)

    def test_immutable(self):
        with pytest.raises(ValueError):
            P3.edges[0, 0] = 2


class TestEdgeSum:
    def test_counting_functional(self):
        for g in (K4, P3, STAR3, EMPTY):
            assert edge_sum(g, lambda x, y: 1.0) == g.m

    def test_complete_arithmetic(self):
        assert edge_sum(K4, lambda x, y: (x + y) / 2) == 18

    def test_path_product(self):
        assert edge_sum(P3, lambda x, y: x * y) == 4

    def test_disjoint_union_linear(self):
        f = lambda x, y: np.sqrt(x) + y**2  # noqa: E731
        for g, h in [(K4, P3), (STAR3, EMPTY), (P3, P3)]:
            assert edge_sum(g.disjoint_union(h), f) == pytest.approx(edge_sum(g, f) + edge_sum(h, f))


class TestIndices:
    @pytest.mark.parametrize("alpha", [NEG_INF, -3, -1, LIM0, 0.5, LIM1, 2, 4, POS_INF])
    def test_regular_graph(self, alpha):
        assert sp_index(K4, alpha) == 18

    def test_path(self):
        assert sp_index(P3, 2) == pytest.approx(3, rel=1e-12)
        assert sp_index(P3, -1) == pytest.approx(2 * math.sqrt(2), rel=1e-12)

    def test_star_log_mean(self):
        assert sp_index(STAR3, LIM0) == pytest.approx(6 / math.log(3), rel=1e-12)

    def test_mso(self):
        for alpha in (NEG_INF, LIM0, 1 / 3, 1, 2, POS_INF):
            assert mso_index(K4, alpha) == 18
        assert mso_index(P3, 1) == pytest.approx(3, rel=1e-12)
        assert mso_index(P3, NEG_INF) == 2

    def test_zagreb(self):
        assert zagreb_m1(P3) == 6
        assert zagreb_m1(K4) == 36
        assert zagreb_m1(EMPTY) == 0

    def test_ka1(self):
        assert ka1_index(P3, 0.5, 2) == pytest.approx(2 * (1 + math.sqrt(2)) ** 2, rel=1e-12)
        assert ka1_index(P3, 0.5, 2) == pytest.approx(11.656854, abs=1e-6)
        assert ka1_index(K4, 1, 1) == 36
        assert ka1_index(EMPTY, 0.3, 5) == 0

    @pytest.mark.parametrize("label", ["sp:-inf", "sp:lim0", "sp:lim1", "mso:1", "m1", "rr",
                                       "ka:0.5:2", "logmean", "idlogmean", "sp:2.5"])
    def test_edgeless_is_zero(self, label):
        assert parse_index(label).evaluate(EMPTY) == 0

    def test_classical_index_equivalences(self):
        for g in er_sample():
            if g.m == 0:
                continue
            rr = reciprocal_randic(g)
            assert sp_index(g, -1) == pytest.approx(rr, rel=1e-10)
            assert mso_index(g, LIM0) == pytest.approx(rr, rel=1e-10)
            assert sp_index(g, 2) == pytest.approx(zagreb_m1(g) / 2, rel=1e-10)
            assert mso_index(g, 1) == pytest.approx(zagreb_m1(g) / 2, rel=1e-10)
            assert sp_index(g, 0.5) == pytest.approx(ka1_index(g, 0.5, 2) / 4, rel=1e-10)
            assert mso_index(g, 0.5) == pytest.approx(ka1_index(g, 0.5, 2) / 4, rel=1e-10)
            for alpha in (NEG_INF, POS_INF):
                assert sp_index(g, alpha) == mso_index(g, alpha)

    def test_graph_chain_and_equality_iff_regular(self):
        for g in list(er_sample()) + [K4, P3, STAR3, K4.disjoint_union(Graph.complete(3))]:
            terms = [sp_index(g, -1), sp_index(g, LIM0), mso_index(g, 1 / 3), sp_index(g, 2)]
            for a, b in zip(terms, terms[1:]):
                assert a <= b * (1 + 1e-12)
            du, dv = g.endpoint_degrees()
            regular_on_edges = bool(np.all(du == dv))
            assert (terms[0] == pytest.approx(terms[3], rel=1e-12)) == regular_on_edges


class TestLabels:
    @pytest.mark.parametrize("label", ["sp:-inf", "sp:lim0", "sp:lim1", "sp:+inf", "sp:2.5",
                                       "mso:1", "m1", "rr", "ka:0.5:2", "logmean"])
    def test_round_trip(self, label):
        assert parse_index(label).label == label

    @pytest.mark.parametrize("label", ["sp", "sp:1", "mso:lim1", "ka:1", "zz", "sp:0"])
    def test_bad(self, label):
        with pytest.raises(ParameterError):
            parse_index(label)

    def test_family_aliases_agree(self):
        g = STAR3
        assert parse_index("logmean").evaluate(g) == parse_index("sp:lim0").evaluate(g)
        assert parse_index("idlogmean").evaluate(g) == parse_index("sp:lim1").evaluate(g)
        assert parse_index("m1").evaluate(g) == 12


class TestEdgeList:
    def test_basic(self):
        g = load_edge_list(io.StringIO("0 1\n1 2"))
        assert g == P3 and g.n == 3

    def test_header_isolated(self):
        g = load_edge_list(io.StringIO("n 5\n0 1\n"))
        assert g.n == 5 and g.m == 1
        assert g.degrees.tolist() == [1, 1, 0, 0, 0]

    def test_comments_crlf(self):
        g = load_edge_list(io.StringIO("# path\r\n0 1 # first\r\n\r\n2 1\r\n"))
        assert g == P3

    @pytest.mark.parametrize(
        "text, lineno",
        [("0 0", 1), ("0 1\n1 0", 2), ("0 1\nx 2", 2), ("0 1 2", 1), ("n 2\n0 3", 2), ("0 1\nn 4", 2)],
    )
    def test_errors_carry_line(self, text, lineno):
        with pytest.raises(ParseError) as exc:
            load_edge_list(io.StringIO(text))
        assert exc.value.lineno == lineno
        assert f"line {lineno}" in str(exc.value)

    def test_self_loop_message(self):
        with pytest.raises(ParseError, match="self-loop"):
            load_edge_list(io.StringIO("0 0"))

    def test_write_round_trip(self):
        buf = io.StringIO()
        g = STAR3.disjoint_union(Graph.from_edges(2, []))
        write_edge_list(g, buf)
        buf.seek(0)
        assert load_edge_list(buf) == g
