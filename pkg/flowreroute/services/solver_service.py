import logging
from collections import Counter
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from ..errors.errors import BlockNotUpdatableError, CycleError, InternalSolverError
from ..models.blocks import Block, BlockSet
from ..models.network import Schedule, Update, UpdateFlowNetwork
from ..models.solver import (
    BlockKey,
    LabelVertex,
    PrecedenceDigraph,
    RhGraph,
    SolveResult,
    SolveVerdict,
)
from .block_service import BlockService
from .network_service import NetworkService

logger = logging.getLogger(__name__)

Label = Tuple[Block, ...]


class SolverService:

    @classmethod
    def touch_list(cls, block: Block, remaining: Sequence[Block]) -> List[Block]:
        """
        Blocks of the not yet eliminated set touched by a block, the block itself included
        """
        touched = sorted(
            (other for other in remaining if BlockService.touches(block, other)),
            key=lambda b: b.order_key,
        )
        pairs = [b.pair for b in touched]
        if len(set(pairs)) != len(pairs):
            raise InternalSolverError(f"touch list of block {block.key} holds two blocks of one pair: {[b.key for b in touched]}")
        return touched

    @classmethod
    def sweep_touch_lists(cls, blocks: BlockSet) -> List[List[Block]]:
        """
        Touch list of every block against the blocks not larger than it, in one pass.

        A smaller block touches a larger one exactly when it ends after the larger one
        starts, and only the latest block of each pair can, so a per-pair cursor suffices.
        """
        latest: Dict[int, Block] = {}
        lists: List[List[Block]] = []
        for block in blocks.blocks:
            latest[block.pair] = block
            lists.append(sorted(
                (b for b in latest.values() if b.end_rank > block.start_rank),
                key=lambda b: b.order_key,
            ))
        return lists

    @classmethod
    def congestion_free_labels(cls, touch_list: Sequence[Block], context: BlockSet, counters: Optional[Counter] = None) -> List[Label]:
        ordered = sorted(touch_list, key=lambda b: b.order_key)
        labels = []
        for candidate in permutations(ordered):
            if counters is not None:
                counters["permutations_tested"] += 1
            if BlockService.is_congestion_free(candidate, context):
                labels.append(candidate)
        return labels

    @classmethod
    def labels_consistent(cls, first: Sequence[Union[Block, BlockKey]], second: Sequence[Union[Block, BlockKey]]) -> bool:
        """
        True when the blocks common to both labels appear in the same relative order
        """
        first_keys = [b.key if isinstance(b, Block) else tuple(b) for b in first]
        second_keys = [b.key if isinstance(b, Block) else tuple(b) for b in second]
        core = set(first_keys) & set(second_keys)
        return [k for k in first_keys if k in core] == [k for k in second_keys if k in core]

    @classmethod
    def build_rh(cls, net_or_blocks: Union[UpdateFlowNetwork, BlockSet], counters: Optional[Counter] = None) -> Tuple[BlockSet, RhGraph]:
        """
        Groups of congestion free labels per block, linked only to the neighbouring group
        """
        if isinstance(net_or_blocks, BlockSet):
            blocks = net_or_blocks
        else:
            blocks = BlockService.decompose_blocks(net_or_blocks, BlockService.topological_order(net_or_blocks))
        counters = counters if counters is not None else Counter()

        touch_lists = cls.sweep_touch_lists(blocks)
        label_sets: List[List[Label]] = [[] for _ in blocks.blocks]
        for index in reversed(range(len(blocks.blocks))):
            block = blocks.blocks[index]
            labels = cls.congestion_free_labels(touch_lists[index], blocks, counters)
            if not labels:
                logger.info("block %s of pair %d admits no congestion free label", block.key, block.pair)
                raise BlockNotUpdatableError(block)
            label_sets[index] = labels
            counters["labels"] += len(labels)

        groups: List[Tuple[LabelVertex, ...]] = []
        next_id = 0
        for block, labels in zip(blocks.blocks, label_sets):
            group = []
            for label in labels:
                group.append(LabelVertex(id=next_id, owner=block.key, label=tuple(b.key for b in label)))
                next_id += 1
            groups.append(tuple(group))

        edges = set()
        for index, group in enumerate(groups):
            for position, vertex in enumerate(group):
                for other in group[position + 1:]:
                    edges.add((vertex.id, other.id))
            if index == 0:
                continue
            for previous in groups[index - 1]:
                for vertex in group:
                    if not cls.labels_consistent(previous.label, vertex.label):
                        edges.add((previous.id, vertex.id))

        logger.debug("R_H has %d group(s), %d label(s) and %d edge(s)", len(groups), next_id, len(edges))
        return blocks, RhGraph(owners=tuple(b.key for b in blocks.blocks), groups=tuple(groups), edges=frozenset(edges))

    @classmethod
    def find_independent_set(cls, rh: RhGraph, counters: Optional[Counter] = None) -> Optional[Tuple[LabelVertex, ...]]:
        if not rh.groups:
            return ()
        parent: Dict[int, Optional[LabelVertex]] = {v.id: None for v in rh.groups[0]}
        for previous, group in zip(rh.groups, rh.groups[1:]):
            reachable = [u for u in previous if u.id in parent]
            for vertex in group:
                for candidate in reachable:
                    if not rh.adjacent(candidate, vertex):
                        parent[vertex.id] = candidate
                        break
        if counters is not None:
            counters["dp_states"] += len(parent)

        final = next((v for v in rh.groups[-1] if v.id in parent), None)
        if final is None:
            return None
        chosen = [final]
        while parent[chosen[-1].id] is not None:
            chosen.append(parent[chosen[-1].id])
        return tuple(reversed(chosen))

    @classmethod
    def build_precedence(cls, labels: Sequence[Sequence[Union[Block, BlockKey]]]) -> PrecedenceDigraph:
        graph = nx.DiGraph()
        for label in labels:
            keys = [b.key if isinstance(b, Block) else tuple(b) for b in label]
            graph.add_nodes_from(keys)
            graph.add_edges_from(zip(keys, keys[1:]))
        if not nx.is_directed_acyclic_graph(graph):
            cycle = [edge[0] for edge in nx.find_cycle(graph)]
            raise InternalSolverError(f"precedence digraph has a cycle through blocks {cycle}")
        return PrecedenceDigraph(vertices=tuple(sorted(graph.nodes)), edges=tuple(sorted(graph.edges)))

    @classmethod
    def block_rounds(cls, wave: Sequence[Block]) -> List[frozenset]:
        """
        Activate new interiors, switch the starts, then retire old interiors
        """
        activate = frozenset(Update(vertex=v, pair=b.pair) for b in wave for v in b.new_interior)
        switch = frozenset(Update(vertex=b.start, pair=b.pair) for b in wave)
        retire = frozenset(Update(vertex=v, pair=b.pair) for b in wave for v in b.old_interior)
        return [r for r in (activate, switch, retire) if r]

    @classmethod
    def extract_schedule(cls, net: UpdateFlowNetwork, blocks: BlockSet, iset: Sequence[LabelVertex]) -> Schedule:
        precedence = cls.build_precedence([v.label for v in iset])
        by_key = {b.key: b for b in blocks.blocks}
        graph = nx.DiGraph()
        graph.add_nodes_from(by_key)
        graph.add_edges_from(precedence.edges)

        rounds: List[frozenset] = []
        for generation in nx.topological_generations(graph):
            wave = sorted((by_key[key] for key in generation), key=lambda b: b.order_key)
            rounds.extend(cls.block_rounds(wave))
        schedule = Schedule(rounds=tuple(rounds))

        report = NetworkService.verify_schedule(net, schedule)
        if not report.ok:
            raise InternalSolverError(
                f"extracted schedule fails at round {report.round}: "
                + "; ".join(v.kind.value for v in report.violations)
            )
        return schedule

    @classmethod
    def solve(cls, net: UpdateFlowNetwork) -> SolveResult:
        """
        Decide whether a consistent update schedule exists for a DAG instance and build one
        """
        NetworkService.ensure_valid(net)
        counters: Counter = Counter()
        try:
            order = BlockService.topological_order(net)
        except CycleError as e:
            return SolveResult(verdict=SolveVerdict.NOT_A_DAG, cycle=e.cycle, detail=str(e))

        blocks = BlockService.decompose_blocks(net, order)
        counters["blocks"] = len(blocks)
        try:
            _, rh = cls.build_rh(blocks, counters)
        except BlockNotUpdatableError as e:
            return SolveResult(
                verdict=SolveVerdict.INFEASIBLE,
                witness=e.block,
                detail=str(e),
                counters=dict(counters),
                blocks=blocks,
            )

        iset = cls.find_independent_set(rh, counters)
        if iset is None:
            return SolveResult(
                verdict=SolveVerdict.INFEASIBLE,
                detail=f"no independent set of size {len(blocks)} in R_H",
                counters=dict(counters),
                blocks=blocks,
                rh=rh,
            )

        try:
            schedule = cls.extract_schedule(net, blocks, iset)
        except InternalSolverError as e:
            logger.error("solver produced an unverifiable schedule: %s", e)
            return SolveResult(
                verdict=SolveVerdict.INTERNAL_ERROR,
                detail=str(e),
                counters=dict(counters),
                blocks=blocks,
                rh=rh,
            )
        counters["rounds"] = len(schedule.rounds)
        logger.info("feasible: %d block(s) in %d round(s)", len(blocks), len(schedule.rounds))
        return SolveResult(
            verdict=SolveVerdict.FEASIBLE,
            schedule=schedule,
            counters=dict(counters),
            blocks=blocks,
            rh=rh,
        )
