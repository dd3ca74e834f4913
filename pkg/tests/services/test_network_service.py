import random
from collections import Counter

import pytest

from flowreroute.errors.errors import DuplicateUpdateError, InvalidInstanceError, PreconditionError
from flowreroute.models.generators import RandomParams
from flowreroute.models.network import Schedule, TransientKind, Update, ViolationKind
from flowreroute.services.network_service import NetworkService, TransientReplay
from flowreroute.services.random_service import RandomService


def rounds(*steps):
    return Schedule(rounds=tuple(frozenset(Update(vertex=v, pair=p) for v, p in step) for step in steps))


def test_validate_network_accepts_fig2(fig2):
    """Simple test to cover a valid single pair instance."""
    assert NetworkService.validate_network(fig2) == []


def test_validate_network_demand_over_capacity(make_network):
    """Simple test to cover a single flow larger than its edges."""
    net = make_network([("s", "t", 1)], [(2, ["s", "t"], ["s", "t"])])
    violations = NetworkService.validate_network(net)
    assert {v.kind for v in violations} == {ViolationKind.CAPACITY_EXCEEDED}
    assert {v.detail for v in violations} == {"old flows", "new flows"}


def test_validate_network_shared_old_edge(make_network):
    """Two unit old flows on one capacity 1 edge."""
    net = make_network(
        [("s", "a", 1), ("a", "t", 2), ("s", "b", 1), ("b", "t", 1)],
        [(1, ["s", "a", "t"], ["s", "b", "t"]), (1, ["s", "a", "t"], ["s", "a", "t"])],
    )
    violations = NetworkService.validate_network(net)
    [exceeded] = violations
    assert exceeded.kind == ViolationKind.CAPACITY_EXCEEDED
    assert (exceeded.edge, exceeded.load, exceeded.capacity, exceeded.detail) == (("s", "a"), 2, 1, "old flows")


def test_validate_network_reports_every_malformation(make_network):
    net = make_network(
        [("s", "a", 0), ("a", "t", 1), ("x", "y", 1)],
        [(1, ["s", "a", "t"], ["s", "b", "t"])],
    )
    details = [v.detail for v in NetworkService.validate_network(net)]
    assert any("not positive" in d for d in details)
    assert any("missing edge s->b" in d for d in details)
    assert any("edge x->y lies on no flow path" in d for d in details)


def test_ensure_valid_raises(make_network):
    net = make_network([("s", "t", 1)], [(1, ["s", "t"], ["t", "s"])])
    with pytest.raises(InvalidInstanceError) as e:
        NetworkService.ensure_valid(net)
    assert e.value.violations


def test_initial_state_active_edges(fig2):
    state = NetworkService.initial_state(fig2)
    assert state.resolved == frozenset()
    assert state.active_edges(1) == frozenset({("s", "v1"), ("v1", "v2"), ("v2", "t")})


def test_resolve_update_switches_edges(fig2):
    """Simple test to cover resolving (v1,P)."""
    state = NetworkService.resolve_update(NetworkService.initial_state(fig2), Update(vertex="v1", pair=1))
    active = state.active_edges(1)
    assert ("v1", "v2") not in active
    assert ("v1", "t") in active


def test_resolve_update_terminal_is_noop(fig2):
    initial = NetworkService.initial_state(fig2)
    state = NetworkService.resolve_update(initial, Update(vertex="t", pair=1))
    assert state.active_edges(1) == initial.active_edges(1)


def test_resolve_update_rejects_duplicates_and_strangers(fig2):
    state = NetworkService.resolve_update(NetworkService.initial_state(fig2), Update(vertex="s", pair=1))
    with pytest.raises(DuplicateUpdateError):
        NetworkService.resolve_update(state, Update(vertex="s", pair=1))
    with pytest.raises(PreconditionError):
        NetworkService.resolve_update(state, Update(vertex="x", pair=1))
    with pytest.raises(PreconditionError):
        NetworkService.resolve_update(state, Update(vertex="v1", pair=2))


def test_transient_path_initial_and_loop(fig2):
    initial = NetworkService.initial_state(fig2)
    assert NetworkService.transient_path(initial, 1).vertices == ("s", "v1", "v2", "t")

    looped = NetworkService.resolve_update(initial, Update(vertex="v2", pair=1))
    result = NetworkService.transient_path(looped, 1)
    assert result.kind == TransientKind.LOOP
    assert result.vertices == ("v1", "v2")
    assert not result.ok


def test_transient_path_dead_end(make_network):
    net = make_network(
        [("s", "a", 1), ("a", "t", 1), ("s", "b", 1), ("b", "t", 1)],
        [(1, ["s", "a", "t"], ["s", "b", "t"])],
    )
    state = NetworkService.resolve_update(NetworkService.initial_state(net), Update(vertex="s", pair=1))
    result = NetworkService.transient_path(state, 1)
    assert result.kind == TransientKind.DEAD_END
    assert result.vertex == "b"


def test_check_consistency(fig2, swap_deadlock):
    """Simple test to cover loops and congestion."""
    assert NetworkService.check_consistency(NetworkService.initial_state(fig2)) == []

    looped = NetworkService.resolve_update(NetworkService.initial_state(fig2), Update(vertex="v2", pair=1))
    [violation] = NetworkService.check_consistency(looped)
    assert violation.kind == ViolationKind.NO_TRANSIENT_FLOW
    assert violation.reason.kind == TransientKind.LOOP

    crowded = NetworkService.resolve_all(
        NetworkService.initial_state(swap_deadlock),
        [Update(vertex="b", pair=1), Update(vertex="s", pair=1)],
    )
    violations = NetworkService.check_consistency(crowded)
    assert [v.edge for v in violations] == [("b", "t"), ("s", "b")]
    assert all(v.load == 2 and v.capacity == 1 for v in violations)


def test_effective_updates_fig2(fig2):
    classes = NetworkService.effective_updates(fig2)
    assert [u.vertex for u in classes.switches] == ["s", "v1", "v2"]
    assert classes.activations == ()
    assert classes.deactivations == ()


def test_effective_updates_swap(swap_feasible):
    classes = NetworkService.effective_updates(swap_feasible)
    assert Update(vertex="b", pair=1) in classes.activations
    assert Update(vertex="a", pair=1) in classes.deactivations
    assert Update(vertex="s", pair=2) in classes.switches
    assert Update(vertex="t", pair=1) not in classes.effective


def test_verify_schedule_fig2(fig2):
    """Simple test to cover the three round schedule."""
    report = NetworkService.verify_schedule(fig2, rounds([("v1", 1)], [("v2", 1)], [("s", 1)]))
    assert report.ok


def test_verify_schedule_all_at_once(fig2):
    assert NetworkService.verify_schedule(fig2, rounds([("v1", 1), ("v2", 1), ("s", 1)])).ok


def test_verify_schedule_loop_first(fig2):
    report = NetworkService.verify_schedule(fig2, rounds([("v2", 1)], [("v1", 1)], [("s", 1)]))
    assert not report.ok
    assert report.round == 1
    [violation] = report.violations
    assert violation.kind == ViolationKind.NO_TRANSIENT_FLOW
    assert violation.reason.kind == TransientKind.LOOP
    assert violation.round == 1


def test_verify_schedule_incomplete(fig2):
    report = NetworkService.verify_schedule(fig2, rounds([("v1", 1)]))
    assert not report.ok
    assert report.round is None
    [violation] = report.violations
    assert violation.kind == ViolationKind.INCOMPLETE_SCHEDULE
    assert violation.detail.endswith("s, v2")


def test_verify_schedule_screening(fig2):
    duplicate = NetworkService.verify_schedule(fig2, rounds([("v1", 1)], [("v1", 1)]))
    assert duplicate.round == 2
    assert duplicate.violations[0].kind == ViolationKind.DUPLICATE_UPDATE

    stranger = NetworkService.verify_schedule(fig2, rounds([("v1", 1)], [("x", 1)]))
    assert stranger.round == 2
    assert stranger.violations[0].kind == ViolationKind.INVALID_UPDATE

    empty = NetworkService.verify_schedule(fig2, Schedule(rounds=(frozenset(),)))
    assert empty.round == 1
    assert empty.violations[0].kind == ViolationKind.INVALID_UPDATE


def test_verify_schedule_swap_congestion(swap_deadlock):
    report = NetworkService.verify_schedule(swap_deadlock, rounds([("b", 1)], [("s", 1)]))
    assert report.round == 2
    assert {v.kind for v in report.violations} == {ViolationKind.CAPACITY_EXCEEDED}


@pytest.mark.parametrize("seed", range(30))
def test_verify_schedule_matches_stepwise_replay(seed):
    """The incremental replay agrees with a full consistency check after every update."""
    params = RandomParams(seed=seed, vertices=7 + seed % 5, pairs=1 + seed % 3, cap_min=1, cap_max=2)
    net, _ = RandomService.gen_random_dag(params)
    updates = list(NetworkService.effective_updates(net).effective)
    random.Random(seed).shuffle(updates)

    expected = None
    state = NetworkService.initial_state(net)
    for index, update in enumerate(updates, start=1):
        state = NetworkService.resolve_update(state, update)
        if not NetworkService.is_consistent(state):
            expected = index
            break

    report = NetworkService.verify_schedule(net, Schedule(rounds=tuple(frozenset([u]) for u in updates)))
    assert report.ok == (expected is None)
    assert report.round == expected


def small_net(seed):
    params = RandomParams(seed=seed, vertices=5 + seed % 2, pairs=1 + seed % 3, cap_min=1, cap_max=2)
    return RandomService.gen_random_dag(params)[0]


def recount(net, resolved):
    """Loads rebuilt from the raw paths, with the pairs left without a transient flow."""
    loads, stuck = Counter(), set()
    for pair in net.pairs:
        old_next = dict(zip(pair.old_path, pair.old_path[1:]))
        new_next = dict(zip(pair.new_path, pair.new_path[1:]))
        vertex, edges = net.source, []
        while vertex != net.terminal and len(edges) <= len(pair.vertices):
            following = (new_next if Update(vertex=vertex, pair=pair.id) in resolved else old_next).get(vertex)
            if following is None:
                break
            edges.append((vertex, following))
            vertex = following
        if vertex != net.terminal:
            stuck.add(pair.id)
            continue
        for key in edges:
            loads[key] += pair.demand
    return loads, stuck


@pytest.mark.parametrize("seed", range(60))
def test_check_consistency_matches_recount(seed):
    """Overloads and missing transient flows agree with a count made from the raw paths."""
    net = small_net(seed)
    rng = random.Random(seed)
    updates = [Update(vertex=v, pair=pair.id) for pair in net.pairs for v in sorted(pair.vertices)]
    for _ in range(8):
        resolved = frozenset(u for u in updates if rng.random() < 0.5)
        state = NetworkService.resolve_all(NetworkService.initial_state(net), resolved)
        violations = NetworkService.check_consistency(state)

        loads, stuck = recount(net, resolved)
        capacities = net.capacities()
        assert {v.pair for v in violations if v.kind == ViolationKind.NO_TRANSIENT_FLOW} == stuck
        assert {
            (v.edge, v.load) for v in violations if v.kind == ViolationKind.CAPACITY_EXCEEDED
        } == {(key, load) for key, load in loads.items() if load > capacities.get(key, 0)}


def grouped(updates, rng):
    chunks, at = [], 0
    while at < len(updates):
        size = rng.randint(2, 4)
        chunks.append(frozenset(updates[at:at + size]))
        at += size
    return chunks


@pytest.mark.parametrize("seed", range(60))
def test_verify_schedule_matches_roundwise_check(seed):
    """Rounds of several updates, possibly from several pairs, give the verdict of a full check per round."""
    params = RandomParams(seed=seed, vertices=7 + seed % 5, pairs=1 + seed % 3, cap_min=1, cap_max=3)
    net, _ = RandomService.gen_random_dag(params)
    updates = list(NetworkService.effective_updates(net).effective)
    rng = random.Random(seed)
    rng.shuffle(updates)
    chunks = grouped(updates, rng)

    expected = None
    resolved = set()
    for index, chunk in enumerate(chunks, start=1):
        resolved |= chunk
        state = NetworkService.resolve_all(NetworkService.initial_state(net), resolved)
        if not NetworkService.is_consistent(state):
            expected = index
            break

    report = NetworkService.verify_schedule(net, Schedule(rounds=tuple(chunks)))
    assert report.ok == (expected is None)
    assert report.round == expected


@pytest.mark.parametrize("seed", range(60))
def test_transient_replay_splices_multi_update_rounds(seed):
    params = RandomParams(seed=seed, vertices=7 + seed % 5, pairs=1 + seed % 3, cap_min=1, cap_max=3)
    net, _ = RandomService.gen_random_dag(params)
    updates = list(NetworkService.effective_updates(net).effective)
    rng = random.Random(seed)
    rng.shuffle(updates)

    replay = TransientReplay(NetworkService.initial_state(net))
    resolved = set()
    for chunk in grouped(updates, rng):
        resolved |= chunk
        state = NetworkService.resolve_all(NetworkService.initial_state(net), resolved)
        consistent = NetworkService.is_consistent(state)
        assert replay.apply(chunk) == consistent
        if not consistent:
            break
        loads, _ = recount(net, resolved)
        assert {key: load for key, load in replay.loads.items() if load} == dict(loads)
        for pair in net.pairs:
            path = NetworkService.transient_path(state, pair.id).vertices
            assert [replay.pos[pair.id][v] for v in path] == sorted(replay.pos[pair.id][v] for v in path)
