from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, Optional, Tuple
from enum import Enum

from .network import Vertex

Clause = Tuple[int, ...]


class CnfFormula(BaseModel):
    model_config = ConfigDict(frozen=True)

    num_vars: int = Field(gt=0)
    clauses: Tuple[Clause, ...]

    @field_validator("clauses")
    @classmethod
    def normalise_clauses(cls, clauses: Tuple[Clause, ...]) -> Tuple[Clause, ...]:
        normalised = []
        for clause in clauses:
            literals = sorted(set(clause), key=lambda lit: (abs(lit), lit))
            if not literals:
                raise ValueError("empty clause")
            if 0 in literals:
                raise ValueError("literal 0 is not a variable")
            variables = [abs(lit) for lit in literals]
            if len(set(variables)) != len(variables):
                raise ValueError(f"contradictory clause {tuple(literals)}")
            if len(literals) > 3:
                raise ValueError(f"clause {tuple(literals)} has more than three literals")
            normalised.append(tuple(literals))
        return tuple(normalised)

    @model_validator(mode="after")
    def variables_in_range(self) -> "CnfFormula":
        for clause in self.clauses:
            for literal in clause:
                if abs(literal) > self.num_vars:
                    raise ValueError(f"variable {abs(literal)} exceeds num_vars={self.num_vars}")
        return self

    @property
    def m(self) -> int:
        return len(self.clauses)

    def occurrences(self, literal: int) -> Tuple[int, ...]:
        """
        1-based indices of the clauses containing a literal, ascending
        """
        return tuple(i for i, clause in enumerate(self.clauses, start=1) if literal in clause)

    def position(self, clause_index: int, literal: int) -> int:
        return self.clauses[clause_index - 1].index(literal) + 1


class Assignment(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: Dict[int, bool]

    def satisfies(self, formula: CnfFormula) -> bool:
        if any(v not in self.values for v in range(1, formula.num_vars + 1)):
            return False
        return all(
            any(self.values[abs(lit)] == (lit > 0) for lit in clause)
            for clause in formula.clauses
        )


class GadgetKind(str, Enum):
    TWO_FLOW = "two_flow"
    DAG = "dag"
    RANDOM = "random"


class GadgetMeta(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: GadgetKind
    formula: Optional[CnfFormula] = None
    names: Dict[str, Vertex] = {}  # gadget symbol -> vertex id
    flows: Dict[str, int] = {}  # flow name -> pair id
    notes: Tuple[str, ...] = ()
    generator: Optional[str] = None


class RandomParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    vertices: int = Field(default=8, gt=2)
    pairs: int = Field(default=2, gt=0)
    cap_min: int = Field(default=1, gt=0)
    cap_max: int = Field(default=3, gt=0)
    demand_min: int = Field(default=1, gt=0)
    demand_max: int = Field(default=2, gt=0)

    @model_validator(mode="after")
    def ranges_ordered(self) -> "RandomParams":
        if self.cap_min > self.cap_max:
            raise ValueError("cap_min exceeds cap_max")
        if self.demand_min > self.demand_max:
            raise ValueError("demand_min exceeds demand_max")
        return self
