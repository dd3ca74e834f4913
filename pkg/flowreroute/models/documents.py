from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, field_validator
from typing import List

FORMAT_VERSION = 1


class EdgeRecord(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    tail: StrictStr = Field(alias="from")
    head: StrictStr = Field(alias="to")
    cap: StrictInt


class PairRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: StrictInt
    demand: StrictInt
    old: List[StrictStr]
    new: List[StrictStr]


class InstanceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: StrictInt
    source: StrictStr
    terminal: StrictStr
    edges: List[EdgeRecord]
    pairs: List[PairRecord]

    @field_validator("version")
    @classmethod
    def supported_version(cls, version: int) -> int:
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported version {version}, expected {FORMAT_VERSION}")
        return version


class UpdateRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertex: StrictStr
    pair: StrictInt


class ScheduleDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: StrictInt
    rounds: List[List[UpdateRecord]]

    @field_validator("version")
    @classmethod
    def supported_version(cls, version: int) -> int:
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported version {version}, expected {FORMAT_VERSION}")
        return version
