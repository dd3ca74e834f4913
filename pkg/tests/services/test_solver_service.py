from collections import Counter
from itertools import combinations, product

import pytest

from flowreroute.errors.errors import BlockNotUpdatableError, InternalSolverError, InvalidInstanceError
from flowreroute.models.generators import RandomParams
from flowreroute.models.solver import SolveVerdict
from flowreroute.services.block_service import BlockService
from flowreroute.services.network_service import NetworkService
from flowreroute.services.random_service import RandomService
from flowreroute.services.solver_service import SolverService


def random_net(seed):
    params = RandomParams(seed=seed, vertices=6 + seed % 7, pairs=1 + seed % 3, cap_min=1, cap_max=2)
    return RandomService.gen_random_dag(params)[0]


def blocks_of(net):
    return BlockService.decompose_blocks(net, BlockService.topological_order(net))


def test_solve_feasible_swap(swap_feasible):
    """Simple test to cover a feasible instance."""
    result = SolverService.solve(swap_feasible)
    assert result.verdict == SolveVerdict.FEASIBLE
    assert NetworkService.verify_schedule(swap_feasible, result.schedule).ok
    assert len(result.schedule.rounds) == 6
    assert result.counters["blocks"] == 2
    assert result.counters["rounds"] == 6


def test_solve_deadlocked_swap(swap_deadlock):
    result = SolverService.solve(swap_deadlock)
    assert result.verdict == SolveVerdict.INFEASIBLE
    assert result.witness.key == (2, 1)
    assert result.schedule is None


def test_solve_cyclic_instance(fig2):
    result = SolverService.solve(fig2)
    assert result.verdict == SolveVerdict.NOT_A_DAG
    assert set(result.cycle) == {"v1", "v2"}


def test_solve_invalid_instance(make_network):
    net = make_network([("s", "t", 1)], [(2, ["s", "t"], ["s", "t"])])
    with pytest.raises(InvalidInstanceError):
        SolverService.solve(net)


def test_solve_nothing_to_update(make_network):
    net = make_network([("s", "t", 1)], [(1, ["s", "t"], ["s", "t"])])
    result = SolverService.solve(net)
    assert result.verdict == SolveVerdict.FEASIBLE
    assert result.schedule.rounds == ()


def test_solve_independent_blocks_share_rounds(two_blocks):
    result = SolverService.solve(two_blocks)
    assert result.verdict == SolveVerdict.FEASIBLE
    assert len(result.schedule.rounds) == 3


def test_block_rounds(swap_feasible):
    first, _ = blocks_of(swap_feasible).blocks
    activate, switch, retire = SolverService.block_rounds([first])
    assert {u.vertex for u in activate} == {"b"}
    assert {u.vertex for u in switch} == {"s"}
    assert {u.vertex for u in retire} == {"a"}


def test_congestion_free_labels(swap_feasible, swap_deadlock):
    blocks = blocks_of(swap_feasible)
    touch_list = SolverService.sweep_touch_lists(blocks)[-1]
    counters = Counter()
    labels = SolverService.congestion_free_labels(touch_list, blocks, counters)
    assert [[b.key for b in label] for label in labels] == [[(1, 1), (2, 1)]]
    assert counters["permutations_tested"] == 2

    blocks = blocks_of(swap_deadlock)
    assert SolverService.congestion_free_labels(SolverService.sweep_touch_lists(blocks)[-1], blocks) == []


def test_labels_consistent():
    assert SolverService.labels_consistent([(1, 1), (2, 1)], [(1, 1), (3, 1), (2, 1)])
    assert not SolverService.labels_consistent([(1, 1), (2, 1)], [(2, 1), (1, 1)])
    assert SolverService.labels_consistent([(1, 1)], [(2, 1)])


def test_touch_list_rejects_two_blocks_of_one_pair(make_network):
    net = make_network(
        [("s", "a", 1), ("a", "b", 1), ("b", "c", 1), ("s", "c", 1), ("c", "t", 1), ("a", "t", 1)],
        [(1, ["s", "a", "b", "c", "t"], ["s", "c", "t"]), (1, ["s", "a", "t"], ["s", "a", "t"])],
    )
    blocks = blocks_of(net)
    [block] = blocks.blocks
    with pytest.raises(InternalSolverError):
        SolverService.touch_list(block, [block, block.model_copy(update={"index": 2})])


def test_build_precedence_cycle():
    with pytest.raises(InternalSolverError):
        SolverService.build_precedence([[(1, 1), (2, 1)], [(2, 1), (1, 1)]])


@pytest.mark.parametrize("seed", range(40))
def test_sweep_matches_touch_lists(seed):
    """The one pass sweep finds the same touch lists as a direct scan."""
    net = random_net(seed)
    blocks = blocks_of(net)
    swept = SolverService.sweep_touch_lists(blocks)
    for index, block in enumerate(blocks.blocks):
        direct = SolverService.touch_list(block, blocks.blocks[:index + 1])
        assert [b.key for b in swept[index]] == [b.key for b in direct]


@pytest.mark.parametrize("seed", range(200))
def test_rh_structure(seed, random_corpus):
    """Edges only join labels of one group or of neighbouring groups; found sets stay consistent."""
    net = random_corpus(seed)
    try:
        blocks, rh = SolverService.build_rh(net)
    except BlockNotUpdatableError:
        return
    group_of = {v.id: index for index, group in enumerate(rh.groups) for v in group}
    for a, b in rh.edges:
        assert abs(group_of[a] - group_of[b]) <= 1

    iset = SolverService.find_independent_set(rh)
    if iset is None:
        return
    assert [v.owner for v in iset] == list(rh.owners)
    for first, second in combinations(iset, 2):
        assert SolverService.labels_consistent(first.label, second.label)
    SolverService.build_precedence([v.label for v in iset])


@pytest.mark.parametrize("seed", range(200))
def test_independent_set_matches_exhaustive_search(seed, random_corpus):
    net = random_corpus(seed)
    try:
        _, rh = SolverService.build_rh(net)
    except BlockNotUpdatableError:
        return
    if len(rh.groups) > 6 or any(len(group) > 6 for group in rh.groups):
        pytest.skip("label graph too large for the exhaustive search")
    exhaustive = any(
        not any(rh.adjacent(a, b) for a, b in combinations(choice, 2))
        for choice in product(*rh.groups)
    )
    counters = Counter()
    assert (SolverService.find_independent_set(rh, counters) is not None) == exhaustive
    assert counters["dp_states"] >= 0
