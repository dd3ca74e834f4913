from pydantic import BaseModel, ConfigDict, Field
from typing import Optional
from enum import Enum

from .network import Schedule


class SearchLimits(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_states: int = Field(default=10**7, gt=0)
    max_depth: Optional[int] = Field(default=None, gt=0)  # None: |V| * k
    max_seconds: Optional[float] = Field(default=None, gt=0)


class OracleVerdict(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    LIMIT_EXCEEDED = "limit-exceeded"


class OracleResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: OracleVerdict
    schedule: Optional[Schedule] = None
    states_visited: int = 0
    detail: Optional[str] = None
