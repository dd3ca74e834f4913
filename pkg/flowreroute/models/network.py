from pydantic import BaseModel, ConfigDict, field_validator
from typing import Dict, FrozenSet, List, Optional, Set, Tuple
from enum import Enum

Vertex = str
EdgeKey = Tuple[str, str]


class Edge(BaseModel):
    model_config = ConfigDict(frozen=True)

    tail: Vertex
    head: Vertex
    capacity: int

    @property
    def key(self) -> EdgeKey:
        return (self.tail, self.head)


class FlowPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    demand: int
    old_path: Tuple[Vertex, ...]
    new_path: Tuple[Vertex, ...]

    @staticmethod
    def path_edges(path: Tuple[Vertex, ...]) -> List[EdgeKey]:
        return list(zip(path, path[1:]))

    @property
    def old_edges(self) -> List[EdgeKey]:
        return self.path_edges(self.old_path)

    @property
    def new_edges(self) -> List[EdgeKey]:
        return self.path_edges(self.new_path)

    @property
    def shared_edges(self) -> FrozenSet[EdgeKey]:
        return frozenset(self.old_edges) & frozenset(self.new_edges)

    @property
    def vertices(self) -> FrozenSet[Vertex]:
        return frozenset(self.old_path) | frozenset(self.new_path)


class UpdateFlowNetwork(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: Vertex
    terminal: Vertex
    edges: Tuple[Edge, ...]
    pairs: Tuple[FlowPair, ...]

    @field_validator("edges")
    @classmethod
    def canonical_edge_order(cls, edges: Tuple[Edge, ...]) -> Tuple[Edge, ...]:
        return tuple(sorted(edges, key=lambda e: (e.tail, e.head, e.capacity)))

    @property
    def vertices(self) -> FrozenSet[Vertex]:
        found = {self.source, self.terminal}
        for edge in self.edges:
            found.update(edge.key)
        for pair in self.pairs:
            found.update(pair.vertices)
        return frozenset(found)

    def capacities(self) -> Dict[EdgeKey, int]:
        return {edge.key: edge.capacity for edge in self.edges}

    def pair(self, pair_id: int) -> FlowPair:
        for pair in self.pairs:
            if pair.id == pair_id:
                return pair
        raise KeyError(pair_id)

    @property
    def k(self) -> int:
        return len(self.pairs)


class Update(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertex: Vertex
    pair: int

    @property
    def sort_key(self) -> Tuple[int, str]:
        return (self.pair, self.vertex)


class Schedule(BaseModel):
    model_config = ConfigDict(frozen=True)

    rounds: Tuple[FrozenSet[Update], ...] = ()
    repeats: Tuple[Tuple[int, Update], ...] = ()  # (1-based round, update) listed more than once in that round

    @property
    def updates(self) -> List[Update]:
        return [u for r in self.rounds for u in sorted(r, key=lambda u: u.sort_key)]

    def singleton_rounds(self) -> "Schedule":
        return Schedule(rounds=tuple(frozenset([u]) for u in self.updates))

    def round_of(self) -> Dict[Update, int]:
        """
        Map every update to the 1-based round resolving it (first occurrence)
        """
        positions: Dict[Update, int] = {}
        for index, current in enumerate(self.rounds, start=1):
            for update in current:
                positions.setdefault(update, index)
        return positions


class UpdateKind(str, Enum):
    NO_OP = "no_op"
    ACTIVATION = "activation"
    DEACTIVATION = "deactivation"
    SWITCH = "switch"


class UpdateClasses(BaseModel):
    model_config = ConfigDict(frozen=True)

    activations: Tuple[Update, ...]
    deactivations: Tuple[Update, ...]
    switches: Tuple[Update, ...]

    @property
    def effective(self) -> Tuple[Update, ...]:
        return tuple(sorted(self.activations + self.deactivations + self.switches,
                            key=lambda u: u.sort_key))


class TransientKind(str, Enum):
    PATH = "path"
    DEAD_END = "dead_end"
    LOOP = "loop"


class TransientResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: TransientKind
    vertices: Tuple[Vertex, ...]  # the path, the loop, or the walk up to the dead end
    vertex: Optional[Vertex] = None

    @property
    def ok(self) -> bool:
        return self.kind == TransientKind.PATH

    @property
    def edges(self) -> List[EdgeKey]:
        return FlowPair.path_edges(self.vertices) if self.ok else []


class ViolationKind(str, Enum):
    NO_TRANSIENT_FLOW = "no_transient_flow"
    CAPACITY_EXCEEDED = "capacity_exceeded"
    MALFORMED_INSTANCE = "malformed_instance"
    DUPLICATE_UPDATE = "duplicate_update"
    INVALID_UPDATE = "invalid_update"
    INCOMPLETE_SCHEDULE = "incomplete_schedule"


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    pair: Optional[int] = None
    reason: Optional[TransientResult] = None
    edge: Optional[EdgeKey] = None
    load: Optional[int] = None
    capacity: Optional[int] = None
    update: Optional[Update] = None
    detail: Optional[str] = None
    round: Optional[int] = None


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool
    round: Optional[int] = None
    violations: Tuple[Violation, ...] = ()


class PairRoutes(BaseModel):
    model_config = ConfigDict(frozen=True)

    demand: int
    old_next: Dict[Vertex, Vertex]
    new_next: Dict[Vertex, Vertex]
    shared: FrozenSet[EdgeKey]
    vertices: FrozenSet[Vertex]

    def hop(self, vertex: Vertex, resolved: bool) -> Optional[Vertex]:
        # a vertex only on the new path keeps no active edge until resolved
        return self.new_next.get(vertex) if resolved else self.old_next.get(vertex)


class NetworkState(BaseModel):
    model_config = ConfigDict(frozen=True)

    network: UpdateFlowNetwork
    routes: Dict[int, PairRoutes]
    capacities: Dict[EdgeKey, int]
    resolved: FrozenSet[Update] = frozenset()

    def resolved_vertices(self) -> Dict[int, Set[Vertex]]:
        by_pair: Dict[int, Set[Vertex]] = {pair_id: set() for pair_id in self.routes}
        for update in self.resolved:
            by_pair.setdefault(update.pair, set()).add(update.vertex)
        return by_pair

    def active_edges(self, pair_id: int) -> FrozenSet[EdgeKey]:
        route = self.routes[pair_id]
        switched = self.resolved_vertices()[pair_id]
        active = set()
        for vertex in route.vertices:
            head = route.hop(vertex, vertex in switched)
            if head is not None:
                active.add((vertex, head))
        return frozenset(active)
