from pydantic import BaseModel, ConfigDict
from typing import Dict, FrozenSet, Optional, Tuple
from enum import Enum

from .blocks import Block, BlockSet
from .network import Schedule, Vertex

BlockKey = Tuple[int, int]


class LabelVertex(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    owner: BlockKey
    label: Tuple[BlockKey, ...]  # update order, first element updated first


class RhGraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    owners: Tuple[BlockKey, ...]  # group i belongs to block b_(i+1) in block order
    groups: Tuple[Tuple[LabelVertex, ...], ...]
    edges: FrozenSet[Tuple[int, int]]  # (smaller id, larger id)

    def adjacent(self, a: LabelVertex, b: LabelVertex) -> bool:
        return (min(a.id, b.id), max(a.id, b.id)) in self.edges

    def describe(self) -> dict:
        return {
            "groups": [
                {
                    "owner": list(owner),
                    "labels": [
                        {"id": v.id, "label": [list(key) for key in v.label]}
                        for v in group
                    ],
                }
                for owner, group in zip(self.owners, self.groups)
            ],
            "edges": [list(edge) for edge in sorted(self.edges)],
        }


class PrecedenceDigraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[BlockKey, ...]
    edges: Tuple[Tuple[BlockKey, BlockKey], ...]  # (earlier, later)


class SolveVerdict(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    NOT_A_DAG = "not-a-dag"
    INTERNAL_ERROR = "internal-error"


class SolveResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: SolveVerdict
    schedule: Optional[Schedule] = None
    witness: Optional[Block] = None
    cycle: Optional[Tuple[Vertex, ...]] = None
    detail: Optional[str] = None
    counters: Dict[str, int] = {}
    blocks: Optional[BlockSet] = None
    rh: Optional[RhGraph] = None
