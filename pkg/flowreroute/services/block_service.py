import logging
from collections import Counter
from typing import Dict, List, Sequence

import networkx as nx

from ..errors.errors import CongestionError, CycleError, PreconditionError
from ..models.blocks import Block, BlockSet, LoadState, Ordering, TopoOrder
from ..models.network import EdgeKey, FlowPair, UpdateFlowNetwork

logger = logging.getLogger(__name__)


class BlockService:

    @classmethod
    def update_graph(cls, net: UpdateFlowNetwork) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(net.vertices)
        graph.add_edges_from(edge.key for edge in net.edges)
        for pair in net.pairs:
            graph.add_edges_from(pair.old_edges)
            graph.add_edges_from(pair.new_edges)
        return graph

    @classmethod
    def topological_order(cls, net: UpdateFlowNetwork) -> TopoOrder:
        """
        Topological order of the update graph, ties broken by vertex id
        """
        graph = cls.update_graph(net)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = [tail for tail, _ in nx.find_cycle(graph)]
            logger.info("update graph has a cycle through %s", cycle)
            raise CycleError(cycle)
        vertices = tuple(nx.lexicographical_topological_sort(graph))
        return TopoOrder(vertices=vertices, rank={v: i for i, v in enumerate(vertices, start=1)})

    @classmethod
    def _pair_blocks(cls, pair: FlowPair, order: TopoOrder) -> List[Block]:
        old_position = {v: i for i, v in enumerate(pair.old_path)}
        new_position = {v: i for i, v in enumerate(pair.new_path)}
        common = sorted(set(old_position) & set(new_position), key=lambda v: order.rank[v])
        blocks: List[Block] = []
        for start, end in zip(common, common[1:]):
            old_segment = tuple(FlowPair.path_edges(pair.old_path[old_position[start]:old_position[end] + 1]))
            new_segment = tuple(FlowPair.path_edges(pair.new_path[new_position[start]:new_position[end] + 1]))
            if old_segment == new_segment:
                continue
            vertices = {v for edge in old_segment + new_segment for v in edge}
            blocks.append(Block(
                pair=pair.id,
                index=len(blocks) + 1,
                start=start,
                end=end,
                start_rank=order.rank[start],
                end_rank=order.rank[end],
                old_segment=old_segment,
                new_segment=new_segment,
                demand=pair.demand,
                ranks=tuple(sorted(order.rank[v] for v in vertices)),
            ))
        return blocks

    @classmethod
    def decompose_blocks(cls, net: UpdateFlowNetwork, order: TopoOrder) -> BlockSet:
        """
        Split every pair into its divergent segments between consecutive common vertices
        """
        blocks: List[Block] = []
        constant: Counter = Counter()
        for pair in net.pairs:
            blocks.extend(cls._pair_blocks(pair, order))
            for key in pair.shared_edges:
                constant[key] += pair.demand
        blocks.sort(key=lambda b: b.order_key)
        logger.debug("decomposed %d pair(s) into %d block(s)", net.k, len(blocks))
        return BlockSet(blocks=tuple(blocks), capacities=net.capacities(), constant_load=dict(constant))

    @classmethod
    def compare_blocks(cls, first: Block, second: Block) -> Ordering:
        if first.key == second.key:
            raise PreconditionError(f"cannot order block {first.key} against itself")
        return Ordering.LESS if first.order_key < second.order_key else Ordering.GREATER

    @classmethod
    def touches(cls, first: Block, second: Block) -> bool:
        return (
            any(second.start_rank < r < second.end_rank for r in first.ranks)
            or any(first.start_rank < r < first.end_rank for r in second.ranks)
        )

    @classmethod
    def initial_loads(cls, blocks: Sequence[Block], context: BlockSet) -> LoadState:
        loads: Dict[EdgeKey, int] = {}
        for block in blocks:
            for key in block.edges:
                loads[key] = context.constant_load.get(key, 0)
        for block in blocks:
            for key in block.old_segment:
                loads[key] += block.demand
        capacities = {key: context.capacities.get(key, 0) for key in loads}
        return LoadState(capacities=capacities, loads=loads)

    @classmethod
    def apply_block_update(cls, state: LoadState, block: Block) -> LoadState:
        """
        Move a block's demand from its old segment to its new segment in one step
        """
        if block.key in state.updated:
            raise PreconditionError(f"block {block.key} was already updated")
        loads = dict(state.loads)
        for key in block.old_segment:
            loads[key] = loads.get(key, 0) - block.demand
        for key in block.new_segment:
            loads[key] = loads.get(key, 0) + block.demand
        for key in block.new_segment:
            capacity = state.capacities.get(key, 0)
            if loads[key] > capacity:
                raise CongestionError(key, loads[key], capacity)
        return LoadState(capacities=state.capacities, loads=loads, updated=state.updated | {block.key})

    @classmethod
    def is_congestion_free(cls, permutation: Sequence[Block], context: BlockSet) -> bool:
        state = cls.initial_loads(permutation, context)
        try:
            for block in permutation:
                state = cls.apply_block_update(state, block)
        except CongestionError as e:
            logger.debug("permutation %s blocked at %s", [b.key for b in permutation], e.edge)
            return False
        return True
