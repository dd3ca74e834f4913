import json
import logging
from collections import Counter
from typing import Any, Type, TypeVar

from pydantic import BaseModel, ValidationError

from ..errors.errors import InstanceFormatError
from ..models.documents import FORMAT_VERSION, InstanceDocument, ScheduleDocument
from ..models.generators import GadgetMeta
from ..models.network import Edge, FlowPair, Schedule, Update, UpdateFlowNetwork

logger = logging.getLogger(__name__)

DocumentT = TypeVar("DocumentT", bound=BaseModel)


class CodecService:

    @classmethod
    def dumps(cls, payload: Any) -> str:
        """
        Canonical text form shared by instances, schedules, sidecar metadata and reports
        """
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def _load(cls, text: str, document: Type[DocumentT]) -> DocumentT:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise InstanceFormatError(e.msg, location=f"line {e.lineno} column {e.colno}")
        try:
            return document.model_validate(raw)
        except ValidationError as e:
            error = e.errors()[0]
            location = ".".join(str(part) for part in error["loc"])
            raise InstanceFormatError(error["msg"], location=location or "document")

    @classmethod
    def parse_instance(cls, text: str) -> UpdateFlowNetwork:
        document = cls._load(text, InstanceDocument)
        return UpdateFlowNetwork(
            source=document.source,
            terminal=document.terminal,
            edges=tuple(Edge(tail=e.tail, head=e.head, capacity=e.cap) for e in document.edges),
            pairs=tuple(
                FlowPair(id=p.id, demand=p.demand, old_path=tuple(p.old), new_path=tuple(p.new))
                for p in document.pairs
            ),
        )

    @classmethod
    def serialize_instance(cls, net: UpdateFlowNetwork) -> str:
        return cls.dumps({
            "version": FORMAT_VERSION,
            "source": net.source,
            "terminal": net.terminal,
            "edges": [
                {"from": e.tail, "to": e.head, "cap": e.capacity}
                for e in sorted(net.edges, key=lambda e: e.key)
            ],
            "pairs": [
                {"id": p.id, "demand": p.demand, "old": list(p.old_path), "new": list(p.new_path)}
                for p in sorted(net.pairs, key=lambda p: p.id)
            ],
        })

    @classmethod
    def parse_schedule(cls, text: str) -> Schedule:
        document = cls._load(text, ScheduleDocument)
        rounds, repeats = [], []
        for index, records in enumerate(document.rounds):
            counts = Counter(Update(vertex=r.vertex, pair=r.pair) for r in records)
            repeats.extend((index + 1, u) for u in sorted(counts, key=lambda u: u.sort_key) if counts[u] > 1)
            rounds.append(frozenset(counts))
        return Schedule(rounds=tuple(rounds), repeats=tuple(repeats))

    @classmethod
    def serialize_schedule(cls, schedule: Schedule) -> str:
        return cls.dumps({
            "version": FORMAT_VERSION,
            "rounds": [
                [{"vertex": u.vertex, "pair": u.pair} for u in sorted(current, key=lambda u: u.sort_key)]
                + [{"vertex": u.vertex, "pair": u.pair} for at, u in schedule.repeats if at == index]
                for index, current in enumerate(schedule.rounds, start=1)
            ],
        })

    @classmethod
    def parse_meta(cls, text: str) -> GadgetMeta:
        return cls._load(text, GadgetMeta)

    @classmethod
    def serialize_meta(cls, meta: GadgetMeta) -> str:
        return cls.dumps(meta.model_dump(mode="json"))
