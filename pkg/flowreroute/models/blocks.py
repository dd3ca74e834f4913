from pydantic import BaseModel, ConfigDict
from typing import Dict, FrozenSet, List, Tuple
from enum import Enum

from .network import EdgeKey, Vertex


class Ordering(str, Enum):
    LESS = "less"
    GREATER = "greater"


class TopoOrder(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[Vertex, ...]
    rank: Dict[Vertex, int]  # 1-based

    def precedes(self, u: Vertex, v: Vertex) -> bool:
        return self.rank[u] < self.rank[v]


class Block(BaseModel):
    model_config = ConfigDict(frozen=True)

    pair: int
    index: int
    start: Vertex
    end: Vertex
    start_rank: int
    end_rank: int
    old_segment: Tuple[EdgeKey, ...]
    new_segment: Tuple[EdgeKey, ...]
    demand: int
    ranks: Tuple[int, ...]  # ranks of all block vertices, ascending

    @property
    def key(self) -> Tuple[int, int]:
        return (self.pair, self.index)

    @property
    def order_key(self) -> Tuple[int, int, int]:
        return (self.start_rank, self.end_rank, self.pair)

    @property
    def old_interior(self) -> List[Vertex]:
        return [tail for tail, _ in self.old_segment[1:]]

    @property
    def new_interior(self) -> List[Vertex]:
        return [tail for tail, _ in self.new_segment[1:]]

    @property
    def vertices(self) -> FrozenSet[Vertex]:
        return frozenset([self.start, self.end, *self.old_interior, *self.new_interior])

    @property
    def edges(self) -> FrozenSet[EdgeKey]:
        return frozenset(self.old_segment) | frozenset(self.new_segment)

    def describe(self) -> dict:
        return {
            "pair": self.pair,
            "index": self.index,
            "start": self.start,
            "end": self.end,
            "old": [list(e) for e in self.old_segment],
            "new": [list(e) for e in self.new_segment],
            "demand": self.demand,
        }


class BlockSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    blocks: Tuple[Block, ...]  # ascending block order
    capacities: Dict[EdgeKey, int]
    constant_load: Dict[EdgeKey, int]  # shared, never toggled edges

    def __len__(self) -> int:
        return len(self.blocks)


class LoadState(BaseModel):
    model_config = ConfigDict(frozen=True)

    capacities: Dict[EdgeKey, int]
    loads: Dict[EdgeKey, int]
    updated: FrozenSet[Tuple[int, int]] = frozenset()
