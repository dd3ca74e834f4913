import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Set

from ..errors.errors import DuplicateUpdateError, InvalidInstanceError, PreconditionError
from ..models.network import (
    EdgeKey,
    FlowPair,
    NetworkState,
    PairRoutes,
    Schedule,
    TransientKind,
    TransientResult,
    Update,
    UpdateClasses,
    UpdateFlowNetwork,
    UpdateKind,
    VerificationReport,
    Violation,
    ViolationKind,
    Vertex,
)

logger = logging.getLogger(__name__)


class NetworkService:

    @classmethod
    def validate_network(cls, net: UpdateFlowNetwork) -> List[Violation]:
        """
        Check every update flow network invariant, an empty list means the instance is valid
        """
        violations: List[Violation] = []

        def malformed(detail: str, pair: Optional[int] = None, edge: Optional[EdgeKey] = None) -> None:
            violations.append(Violation(kind=ViolationKind.MALFORMED_INSTANCE, pair=pair, edge=edge, detail=detail))

        if net.source == net.terminal:
            malformed(f"source and terminal are both {net.source!r}")

        capacities: Dict[EdgeKey, int] = {}
        for edge in net.edges:
            if edge.key in capacities:
                malformed(f"edge {edge.tail}->{edge.head} listed more than once", edge=edge.key)
            if edge.tail == edge.head:
                malformed(f"self loop at {edge.tail!r}", edge=edge.key)
            if edge.capacity < 1:
                malformed(f"capacity {edge.capacity} of {edge.tail}->{edge.head} is not positive", edge=edge.key)
            capacities.setdefault(edge.key, edge.capacity)

        ids = [pair.id for pair in net.pairs]
        if ids != list(range(1, len(ids) + 1)):
            malformed(f"pair ids {ids} are not 1..{len(ids)} in order")
        if not net.pairs:
            malformed("instance has no flow pairs")

        used: Set[EdgeKey] = set()
        for pair in net.pairs:
            if pair.demand < 1:
                malformed(f"demand {pair.demand} is not positive", pair=pair.id)
            for name, path in (("old", pair.old_path), ("new", pair.new_path)):
                if len(path) < 2 or path[0] != net.source or path[-1] != net.terminal:
                    malformed(f"{name} path does not run from {net.source!r} to {net.terminal!r}", pair=pair.id)
                if len(set(path)) != len(path):
                    malformed(f"{name} path revisits a vertex", pair=pair.id)
                for key in FlowPair.path_edges(path):
                    used.add(key)
                    if key not in capacities:
                        malformed(f"{name} path uses missing edge {key[0]}->{key[1]}", pair=pair.id, edge=key)

        for key in sorted(set(capacities) - used):
            malformed(f"edge {key[0]}->{key[1]} lies on no flow path", edge=key)

        for family in ("old", "new"):
            loads: Counter = Counter()
            for pair in net.pairs:
                for key in (pair.old_edges if family == "old" else pair.new_edges):
                    loads[key] += pair.demand
            for key in sorted(loads):
                if key in capacities and loads[key] > capacities[key]:
                    violations.append(Violation(
                        kind=ViolationKind.CAPACITY_EXCEEDED,
                        edge=key,
                        load=loads[key],
                        capacity=capacities[key],
                        detail=f"{family} flows",
                    ))

        if violations:
            logger.info("instance has %d violation(s)", len(violations))
        return violations

    @classmethod
    def ensure_valid(cls, net: UpdateFlowNetwork) -> None:
        violations = cls.validate_network(net)
        if violations:
            raise InvalidInstanceError(violations)

    @classmethod
    def initial_state(cls, net: UpdateFlowNetwork) -> NetworkState:
        """
        State in which no update has been resolved, every pair routes along its old path
        """
        routes = {
            pair.id: PairRoutes(
                demand=pair.demand,
                old_next=dict(zip(pair.old_path, pair.old_path[1:])),
                new_next=dict(zip(pair.new_path, pair.new_path[1:])),
                shared=pair.shared_edges,
                vertices=pair.vertices,
            )
            for pair in net.pairs
        }
        return NetworkState(network=net, routes=routes, capacities=net.capacities())

    @classmethod
    def resolve_update(cls, state: NetworkState, update: Update) -> NetworkState:
        if update in state.resolved:
            raise DuplicateUpdateError(f"update ({update.vertex}, {update.pair}) is already resolved")
        route = state.routes.get(update.pair)
        if route is None or update.vertex not in route.vertices:
            raise PreconditionError(f"vertex {update.vertex!r} is not on the paths of pair {update.pair}")
        return state.model_copy(update={"resolved": state.resolved | {update}})

    @classmethod
    def resolve_all(cls, state: NetworkState, updates: Iterable[Update]) -> NetworkState:
        for update in updates:
            state = cls.resolve_update(state, update)
        return state

    @classmethod
    def _walk(cls, state: NetworkState, pair_id: int, switched: Set[Vertex]) -> TransientResult:
        route = state.routes[pair_id]
        terminal = state.network.terminal
        walk = [state.network.source]
        position = {walk[0]: 0}
        while walk[-1] != terminal:
            head = route.hop(walk[-1], walk[-1] in switched)
            if head is None:
                return TransientResult(kind=TransientKind.DEAD_END, vertices=tuple(walk), vertex=walk[-1])
            if head in position:
                return TransientResult(kind=TransientKind.LOOP, vertices=tuple(walk[position[head]:]), vertex=head)
            position[head] = len(walk)
            walk.append(head)
        return TransientResult(kind=TransientKind.PATH, vertices=tuple(walk))

    @classmethod
    def transient_path(cls, state: NetworkState, pair_id: int) -> TransientResult:
        return cls._walk(state, pair_id, state.resolved_vertices()[pair_id])

    @classmethod
    def check_consistency(cls, state: NetworkState) -> List[Violation]:
        """
        Consistency Rule: every pair has a transient flow and no edge carries more than its capacity
        """
        violations: List[Violation] = []
        loads: Counter = Counter()
        switched = state.resolved_vertices()
        for pair_id in sorted(state.routes):
            result = cls._walk(state, pair_id, switched[pair_id])
            if not result.ok:
                violations.append(Violation(kind=ViolationKind.NO_TRANSIENT_FLOW, pair=pair_id, reason=result))
                continue
            for key in result.edges:
                loads[key] += state.routes[pair_id].demand
        for key in sorted(loads):
            capacity = state.capacities.get(key, 0)
            if loads[key] > capacity:
                violations.append(Violation(
                    kind=ViolationKind.CAPACITY_EXCEEDED,
                    edge=key,
                    load=loads[key],
                    capacity=capacity,
                ))
        return violations

    @classmethod
    def is_consistent(cls, state: NetworkState) -> bool:
        return not cls.check_consistency(state)

    @classmethod
    def _classify(cls, old: Optional[Vertex], new: Optional[Vertex]) -> UpdateKind:
        if old is not None and old == new:
            return UpdateKind.NO_OP
        if old is not None and new is not None:
            return UpdateKind.SWITCH
        if new is not None:
            return UpdateKind.ACTIVATION
        if old is not None:
            return UpdateKind.DEACTIVATION
        return UpdateKind.NO_OP

    @classmethod
    def effective_updates(cls, net: UpdateFlowNetwork) -> UpdateClasses:
        """
        Split the updates that toggle at least one edge into activations, deactivations and switches
        """
        found: Dict[UpdateKind, List[Update]] = {kind: [] for kind in UpdateKind}
        for pair in net.pairs:
            old_next = dict(zip(pair.old_path, pair.old_path[1:]))
            new_next = dict(zip(pair.new_path, pair.new_path[1:]))
            for vertex in sorted(pair.vertices):
                kind = cls._classify(old_next.get(vertex), new_next.get(vertex))
                found[kind].append(Update(vertex=vertex, pair=pair.id))
        return UpdateClasses(
            activations=tuple(found[UpdateKind.ACTIVATION]),
            deactivations=tuple(found[UpdateKind.DEACTIVATION]),
            switches=tuple(found[UpdateKind.SWITCH]),
        )

    @classmethod
    def _screen_rounds(cls, net: UpdateFlowNetwork, schedule: Schedule) -> List[Violation]:
        seen: Set[Update] = set()
        pairs = {pair.id: pair for pair in net.pairs}
        for index, current in enumerate(schedule.rounds, start=1):
            found: List[Violation] = []
            if not current:
                found.append(Violation(kind=ViolationKind.INVALID_UPDATE, detail="empty round", round=index))
            for update in sorted(current, key=lambda u: u.sort_key):
                pair = pairs.get(update.pair)
                if pair is None or update.vertex not in pair.vertices:
                    found.append(Violation(
                        kind=ViolationKind.INVALID_UPDATE,
                        pair=update.pair,
                        update=update,
                        detail=f"vertex {update.vertex!r} is not on the paths of pair {update.pair}",
                        round=index,
                    ))
                elif update in seen:
                    found.append(Violation(kind=ViolationKind.DUPLICATE_UPDATE, pair=update.pair, update=update, round=index))
                seen.add(update)
            for at, update in schedule.repeats:
                if at == index:
                    found.append(Violation(
                        kind=ViolationKind.DUPLICATE_UPDATE,
                        pair=update.pair,
                        update=update,
                        detail="listed twice in one round",
                        round=index,
                    ))
            if found:
                return found
        return []

    @classmethod
    def verify_schedule(cls, net: UpdateFlowNetwork, schedule: Schedule) -> VerificationReport:
        """
        Replay a schedule round by round and report the first round breaking the Consistency Rule
        """
        cls.ensure_valid(net)
        screened = cls._screen_rounds(net, schedule)
        if screened:
            logger.info("schedule rejected before replay at round %d", screened[0].round)
            return VerificationReport(ok=False, round=screened[0].round, violations=tuple(screened))

        initial = cls.initial_state(net)
        replay = TransientReplay(initial)
        resolved: Set[Update] = set()
        for index, current in enumerate(schedule.rounds, start=1):
            resolved.update(current)
            if replay.apply(current):
                continue
            state = initial.model_copy(update={"resolved": frozenset(resolved)})
            violations = cls.check_consistency(state)
            if not violations:
                logger.warning("incremental replay disagreed at round %d, rebuilding", index)
                replay = TransientReplay(state)
                continue
            logger.info("round %d violates the consistency rule (%d violation(s))", index, len(violations))
            return VerificationReport(
                ok=False,
                round=index,
                violations=tuple(v.model_copy(update={"round": index}) for v in violations),
            )

        missing = [u for u in cls.effective_updates(net).effective if u not in resolved]
        if missing:
            violations = []
            for pair_id in sorted({u.pair for u in missing}):
                pending = [u.vertex for u in missing if u.pair == pair_id]
                violations.append(Violation(
                    kind=ViolationKind.INCOMPLETE_SCHEDULE,
                    pair=pair_id,
                    detail="unresolved effective updates at " + ", ".join(pending),
                ))
            return VerificationReport(ok=False, round=None, violations=tuple(violations))

        logger.debug("schedule of %d round(s) verified", len(schedule.rounds))
        return VerificationReport(ok=True)


class TransientReplay:
    """
    Transient paths and edge loads maintained across rounds.

    A round only re-walks a pair from its earliest updated vertex on the current path
    until the walk rejoins the path behind the last updated one, so replaying a whole
    schedule costs about the size of the segments it changes. Positions along each
    path are spaced integers; a splice that runs out of room renumbers that path.
    """

    SPACING = 1 << 32

    def __init__(self, state: NetworkState):
        self.routes = state.routes
        self.capacities = state.capacities
        self.source = state.network.source
        self.terminal = state.network.terminal
        self.switched: Dict[int, Set[Vertex]] = state.resolved_vertices()
        self.succ: Dict[int, Dict[Vertex, Vertex]] = {}
        self.pos: Dict[int, Dict[Vertex, int]] = {}
        self.loads: Counter = Counter()
        for pair_id, route in self.routes.items():
            path = NetworkService._walk(state, pair_id, self.switched[pair_id])
            if not path.ok:
                raise PreconditionError(f"pair {pair_id} has no transient flow to replay from")
            self.succ[pair_id] = dict(zip(path.vertices, path.vertices[1:]))
            self.pos[pair_id] = {v: i * self.SPACING for i, v in enumerate(path.vertices)}
            for key in path.edges:
                self.loads[key] += route.demand

    def apply(self, updates: Iterable[Update]) -> bool:
        touched: Dict[int, List[Vertex]] = {}
        for update in updates:
            self.switched.setdefault(update.pair, set()).add(update.vertex)
            touched.setdefault(update.pair, []).append(update.vertex)
        raised: Set[EdgeKey] = set()
        for pair_id in sorted(touched):
            if not self._splice(pair_id, touched[pair_id], raised):
                return False
        return all(self.loads[key] <= self.capacities.get(key, 0) for key in raised)

    def _splice(self, pair_id: int, vertices: List[Vertex], raised: Set[EdgeKey]) -> bool:
        pos, succ = self.pos[pair_id], self.succ[pair_id]
        on_path = [v for v in vertices if v in pos and v != self.terminal]
        if not on_path:
            return True
        start = min(on_path, key=pos.__getitem__)
        last = max(pos[v] for v in on_path)
        route, switched = self.routes[pair_id], self.switched[pair_id]

        tail, seen = [start], {start}
        while True:
            head = route.hop(tail[-1], tail[-1] in switched)
            if head is None or head in seen:
                return False
            if head in pos and pos[head] < pos[start]:
                return False
            if head == self.terminal or (head in pos and pos[head] > last):
                rejoin = head
                break
            tail.append(head)
            seen.add(head)

        vertex = start
        while vertex != rejoin:
            following = succ.pop(vertex)
            self.loads[(vertex, following)] -= route.demand
            if vertex != start:
                del pos[vertex]
            vertex = following

        chain = tail + [rejoin]
        for tail_vertex, head_vertex in zip(chain, chain[1:]):
            succ[tail_vertex] = head_vertex
            self.loads[(tail_vertex, head_vertex)] += route.demand
            raised.add((tail_vertex, head_vertex))

        low, high = pos[start], pos[rejoin]
        gap = (high - low) // len(tail)
        if gap == 0:
            self._renumber(pair_id)
        else:
            for offset, vertex in enumerate(tail[1:], start=1):
                pos[vertex] = low + offset * gap
        return True

    def _renumber(self, pair_id: int) -> None:
        succ = self.succ[pair_id]
        positions = {self.source: 0}
        vertex = self.source
        while vertex != self.terminal:
            vertex = succ[vertex]
            positions[vertex] = len(positions) * self.SPACING
        self.pos[pair_id] = positions
