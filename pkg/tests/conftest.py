import pytest
from typing import Iterable, Sequence, Tuple

from flowreroute.models.generators import RandomParams
from flowreroute.models.network import Edge, FlowPair, UpdateFlowNetwork
from flowreroute.services.random_service import RandomService


def network(edges: Iterable[Tuple[str, str, int]], pairs: Sequence[Tuple[int, Sequence[str], Sequence[str]]],
            source: str = "s", terminal: str = "t") -> UpdateFlowNetwork:
    return UpdateFlowNetwork(
        source=source,
        terminal=terminal,
        edges=tuple(Edge(tail=a, head=b, capacity=c) for a, b, c in edges),
        pairs=tuple(
            FlowPair(id=i, demand=d, old_path=tuple(old), new_path=tuple(new))
            for i, (d, old, new) in enumerate(pairs, start=1)
        ),
    )


@pytest.fixture
def make_network():
    return network


@pytest.fixture
def fig2():
    """Single unit flow rerouted from s,v1,v2,t to s,v2,v1,t over capacity 1 edges."""
    return network(
        [("s", "v1", 1), ("v1", "v2", 1), ("v2", "t", 1), ("s", "v2", 1), ("v2", "v1", 1), ("v1", "t", 1)],
        [(1, ["s", "v1", "v2", "t"], ["s", "v2", "v1", "t"])],
    )


def swap(capacity_b: int) -> UpdateFlowNetwork:
    return network(
        [("s", "a", 1), ("a", "t", 1), ("s", "b", capacity_b), ("b", "t", capacity_b)],
        [(1, ["s", "a", "t"], ["s", "b", "t"]), (1, ["s", "b", "t"], ["s", "a", "t"])],
    )


@pytest.fixture
def swap_feasible():
    """Two unit flows trading routes, the b route has room for both."""
    return swap(2)


@pytest.fixture
def swap_deadlock():
    """Two unit flows trading routes over capacity 1 edges."""
    return swap(1)


@pytest.fixture
def two_blocks():
    """One pair diverging twice, around c."""
    return network(
        [("s", "a", 1), ("a", "c", 1), ("s", "b", 1), ("b", "c", 1),
         ("c", "d", 1), ("d", "t", 1), ("c", "e", 1), ("e", "t", 1)],
        [(1, ["s", "a", "c", "d", "t"], ["s", "b", "c", "e", "t"])],
    )


def corpus_instance(seed: int) -> UpdateFlowNetwork:
    params = RandomParams(
        seed=seed,
        vertices=5 + seed % 8,
        pairs=1 + seed % 3,
        cap_min=1,
        cap_max=2 + seed % 2,
        demand_min=1,
        demand_max=2,
    )
    return RandomService.gen_random_dag(params)[0]


@pytest.fixture
def random_corpus():
    """Seeded small random DAG instances shared by the cross checks against exhaustive search."""
    return corpus_instance
