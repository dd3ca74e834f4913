import logging
import time
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from ..errors.errors import SearchLimitExceeded
from ..models.network import NetworkState, Schedule, Update, UpdateFlowNetwork
from ..models.oracle import OracleResult, OracleVerdict, SearchLimits
from .network_service import NetworkService

logger = logging.getLogger(__name__)


class _Budget:

    def __init__(self, limits: SearchLimits, net: UpdateFlowNetwork):
        self.max_states = limits.max_states
        self.max_depth = limits.max_depth or len(net.vertices) * max(net.k, 1)
        self.deadline = time.monotonic() + limits.max_seconds if limits.max_seconds else None
        self.states = 0

    def visit(self) -> None:
        self.states += 1
        if self.states > self.max_states:
            raise SearchLimitExceeded(f"more than {self.max_states} states visited")
        if self.deadline is not None and self.states % 256 == 0 and time.monotonic() > self.deadline:
            raise SearchLimitExceeded("wall-clock budget exhausted")


class OracleService:

    @classmethod
    def _moves(cls, net: UpdateFlowNetwork, reduce: bool) -> Tuple[List[Update], List[Update], List[Update]]:
        classes = NetworkService.effective_updates(net)
        if reduce:
            return list(classes.activations), list(classes.switches), list(classes.deactivations)
        return [], list(classes.effective), []

    @classmethod
    def brute_force(cls, net: UpdateFlowNetwork, limits: Optional[SearchLimits] = None, reduce: bool = True) -> OracleResult:
        """
        Exhaustive depth-first search over resolved update sets, valid on any directed instance.

        With reduce, activations are resolved up front and deactivations at the end; an
        activation only matters once a transient flow reaches its vertex and a deactivated
        vertex is never reached again, so the verdict is the one of the full search.
        """
        NetworkService.ensure_valid(net)
        limits = limits or SearchLimits()
        budget = _Budget(limits, net)
        prefix, moves, suffix = cls._moves(net, reduce)
        start = NetworkService.resolve_all(NetworkService.initial_state(net), prefix)
        goal = len(moves)

        visited: Set[FrozenSet[Update]] = set()
        path: List[Update] = []
        depth_cut = False

        def search(state: NetworkState, resolved: FrozenSet[Update]) -> bool:
            nonlocal depth_cut
            if len(path) == goal:
                return True
            if len(path) >= budget.max_depth:
                depth_cut = True
                return False
            for update in moves:
                if update in resolved:
                    continue
                following = resolved | {update}
                if following in visited:
                    continue
                visited.add(following)
                budget.visit()
                candidate = NetworkService.resolve_update(state, update)
                if not NetworkService.is_consistent(candidate):
                    continue
                path.append(update)
                if search(candidate, following):
                    return True
                path.pop()
            return False

        try:
            found = search(start, frozenset())
        except SearchLimitExceeded as e:
            logger.info("oracle stopped after %d state(s): %s", budget.states, e)
            return OracleResult(verdict=OracleVerdict.LIMIT_EXCEEDED, states_visited=budget.states, detail=str(e))

        if found:
            updates = prefix + path + suffix
            schedule = Schedule(rounds=tuple(frozenset([u]) for u in updates))
            logger.info("oracle found a schedule of %d update(s) after %d state(s)", len(updates), budget.states)
            return OracleResult(verdict=OracleVerdict.FEASIBLE, schedule=schedule, states_visited=budget.states)
        if depth_cut:
            return OracleResult(
                verdict=OracleVerdict.LIMIT_EXCEEDED,
                states_visited=budget.states,
                detail=f"depth limit {budget.max_depth} cut the search",
            )
        logger.info("oracle exhausted %d state(s) without a schedule", budget.states)
        return OracleResult(verdict=OracleVerdict.INFEASIBLE, states_visited=budget.states)

    @classmethod
    def enumerate_feasible_prefixes(cls, net: UpdateFlowNetwork, depth: int, limits: Optional[SearchLimits] = None) -> List[Tuple[Update, ...]]:
        """
        Consistency preserving sequences of effective updates of the given length, one per
        resolved set; a sequence resolving every effective update is kept even when shorter
        """
        NetworkService.ensure_valid(net)
        budget = _Budget(limits or SearchLimits(), net)
        moves = list(NetworkService.effective_updates(net).effective)
        initial = NetworkService.initial_state(net)
        frontier: Dict[FrozenSet[Update], Tuple[NetworkState, Tuple[Update, ...]]] = {frozenset(): (initial, ())}
        complete: List[Tuple[Update, ...]] = []

        for _ in range(depth):
            following: Dict[FrozenSet[Update], Tuple[NetworkState, Tuple[Update, ...]]] = {}
            rejected: Set[FrozenSet[Update]] = set()
            for resolved, (state, sequence) in frontier.items():
                if len(resolved) == len(moves):
                    complete.append(sequence)
                    continue
                for update in moves:
                    if update in resolved:
                        continue
                    key = resolved | {update}
                    if key in following or key in rejected:
                        continue
                    budget.visit()
                    candidate = NetworkService.resolve_update(state, update)
                    if NetworkService.is_consistent(candidate):
                        following[key] = (candidate, sequence + (update,))
                    else:
                        rejected.add(key)
            frontier = following

        found = complete + [sequence for _, sequence in frontier.values()]
        return sorted(found, key=lambda seq: [u.sort_key for u in seq])

    @classmethod
    def first_moves(cls, net: UpdateFlowNetwork) -> List[Update]:
        return [sequence[0] for sequence in cls.enumerate_feasible_prefixes(net, 1) if sequence]

