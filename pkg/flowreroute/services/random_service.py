import logging
import random
from collections import Counter
from typing import List, Tuple

from ..models.generators import GadgetKind, GadgetMeta, RandomParams
from ..models.network import Edge, FlowPair, UpdateFlowNetwork, Vertex

logger = logging.getLogger(__name__)

GENERATOR = "mt19937-1"


class RandomService:

    @classmethod
    def _sample(cls, rng: random.Random, vertices: List[Vertex], rank: dict) -> List[Vertex]:
        chosen = [v for v in vertices if rng.random() < 0.5]
        return sorted(chosen, key=lambda v: rank[v])

    @classmethod
    def gen_random_dag(cls, params: RandomParams) -> Tuple[UpdateFlowNetwork, GadgetMeta]:
        """
        Random valid instance whose paths all follow one fixed vertex ranking, so the union is acyclic.
        The same parameters always give the same instance.
        """
        rng = random.Random(params.seed)
        inner = [f"n{i}" for i in range(1, params.vertices - 1)]
        rank = {v: i for i, v in enumerate(["s", *inner, "t"])}

        pairs = []
        for pair_id in range(1, params.pairs + 1):
            old_inner = cls._sample(rng, inner, rank)
            anchors = [v for v in old_inner if rng.random() < 0.5]
            fresh = cls._sample(rng, [v for v in inner if v not in old_inner], rank)
            new_inner = sorted(anchors + fresh, key=lambda v: rank[v])
            pairs.append(FlowPair(
                id=pair_id,
                demand=rng.randint(params.demand_min, params.demand_max),
                old_path=("s", *old_inner, "t"),
                new_path=("s", *new_inner, "t"),
            ))

        old_load: Counter = Counter()
        new_load: Counter = Counter()
        for pair in pairs:
            for key in pair.old_edges:
                old_load[key] += pair.demand
            for key in pair.new_edges:
                new_load[key] += pair.demand
        edges = []
        for key in sorted(set(old_load) | set(new_load)):
            drawn = rng.randint(params.cap_min, params.cap_max)
            edges.append(Edge(tail=key[0], head=key[1], capacity=max(drawn, old_load[key], new_load[key])))

        net = UpdateFlowNetwork(source="s", terminal="t", edges=tuple(edges), pairs=tuple(pairs))
        meta = GadgetMeta(kind=GadgetKind.RANDOM, generator=GENERATOR, notes=(f"seed={params.seed}",))
        logger.debug("random instance seed=%d: %d pair(s), %d edge(s)", params.seed, net.k, len(edges))
        return net, meta
