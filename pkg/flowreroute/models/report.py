from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import Any, Dict, List


class ExitReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: str
    verdict: str
    artifacts: List[str] = []
    timing_ms: int = Field(default=0, ge=0)
    counters: Dict[str, int] = {}
    details: Dict[str, Any] = {}

    @field_validator("counters")
    @classmethod
    def counters_non_negative(cls, counters: Dict[str, int]) -> Dict[str, int]:
        negative = [name for name, value in counters.items() if value < 0]
        if negative:
            raise ValueError(f"negative counters: {', '.join(sorted(negative))}")
        return counters
