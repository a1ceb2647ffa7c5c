import pytest

from hetnet import corpus
from hetnet.completion import is_complete
from hetnet.errors import InvalidShapeError
from hetnet.graphs import admissibility_violations, decompose_two_cycles, is_strongly_connected


REALISABLE = [name for name, e in corpus.CORPUS.items() if e.build is not None]


@pytest.mark.parametrize("name", REALISABLE)
def test_realisable_entries_admit_the_construction(name):
    g = corpus.get(name).graph
    assert admissibility_violations(g) == []
    assert is_strongly_connected(g)


@pytest.mark.parametrize(
    "name,klm",
    [
        ("kirk-silber", (3, 3, 1)),
        ("bowtie", (3, 3, 0)),
        ("house", (3, 4, 1)),
        ("two-squares", (4, 4, 1)),
        ("b3-c4", (3, 4, 2)),
    ],
)
def test_catalogue_parameters_match_decomposition(name, klm):
    entry = corpus.get(name)
    dec = decompose_two_cycles(entry.graph)
    assert (dec.k, dec.l, dec.m) == klm
    assert (entry.k, entry.l, entry.m) == klm
    assert entry.graph.n == entry.dimension


@pytest.mark.parametrize(
    "name",
    ["kirk-silber-completed", "bowtie-completed", "house-completed-a",
     "house-completed-b", "donut", "b3-c4"],
)
def test_completed_entries_are_complete(name):
    assert is_complete(corpus.get(name).graph)


def test_blocked_entries_have_no_graph():
    for name in ("c2-c2", "b2-b2", "torus-6-6"):
        entry = corpus.get(name)
        assert not entry.simplex_realisable
        assert entry.graph is None


def test_unknown_name():
    with pytest.raises(KeyError, match="unknown corpus graph"):
        corpus.get("klein-bottle")


class TestMakeTwoCycle:
    def test_shared_vertex_only(self):
        g = corpus.make_two_cycle(3, 3, 0)
        assert g.n == 5
        dec = decompose_two_cycles(g)
        assert dec.v_d == dec.v_c == 1

    def test_rejects_bad_shapes(self):
        with pytest.raises(InvalidShapeError):
            corpus.make_two_cycle(3, 3, 2)
        with pytest.raises(InvalidShapeError):
            corpus.make_two_cycle(2, 5, 0)

    def test_distribution_vertex_is_one(self):
        dec = decompose_two_cycles(corpus.make_two_cycle(4, 6, 2))
        assert dec.v_d == 1
