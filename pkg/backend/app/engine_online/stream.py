"""
stream.py - JSON-lines event stream for the online engine.

Each input line is one operation; each observable outcome becomes one output
event line.
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Iterable, List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from app.core.composition import Request, Service
from app.core.errors import InstanceError
from app.engine_online.failover import FailoverManager
from app.engine_online.state import Event

logger = logging.getLogger(__name__)


class _Op(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


class RegisterServiceOp(_Op):
    op: Literal["register_service"]
    name: str = Field(..., min_length=1)
    inputs: List[str] = Field(default_factory=list, alias="in")
    outputs: List[str] = Field(default_factory=list, alias="out")


class RemoveServiceOp(_Op):
    op: Literal["remove_service", "detect_service_down"]
    name: str


class FindCompositionOp(_Op):
    op: Literal["find_composition"]
    id: str
    known: List[str] = Field(default_factory=list)
    required: List[str] = Field(default_factory=list)


class DropRequestOp(_Op):
    op: Literal["drop_request"]
    id: str


StreamOp = Annotated[
    Union[RegisterServiceOp, RemoveServiceOp, FindCompositionOp, DropRequestOp],
    Field(discriminator="op"),
]
_OP_ADAPTER = TypeAdapter(StreamOp)


def parse_stream(lines: Iterable[str]) -> List[StreamOp]:
    ops: List[StreamOp] = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            ops.append(_OP_ADAPTER.validate_python(json.loads(line)))
        except (json.JSONDecodeError, ValidationError) as exc:
            raise InstanceError(f"Bad stream line {lineno}: {exc}") from exc
    return ops


def read_stream(path: Union[str, Path]) -> List[StreamOp]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parse_stream(f)
    except OSError as exc:
        raise InstanceError(f"Cannot read stream {path}: {exc}") from exc


def apply_op(manager: FailoverManager, op: StreamOp) -> List[Event]:
    if isinstance(op, RegisterServiceOp):
        return manager.register_service(Service.from_names(op.name, op.inputs, op.outputs))
    if isinstance(op, RemoveServiceOp):
        return manager.delete_service(op.name)
    if isinstance(op, FindCompositionOp):
        return [manager.find_request(op.id, Request.from_names(op.known, op.required))]
    manager.drop_composition_request(op.id)
    return []


def replay_stream(ops: Iterable[StreamOp], manager: FailoverManager) -> List[Event]:
    """Apply every operation in order; backups settle before the next one
    unless the manager runs them asynchronously."""
    events: List[Event] = []
    for op in ops:
        events.extend(apply_op(manager, op))
    manager.wait()
    logger.info(
        f"Replayed stream: {len(events)} events, "
        f"{manager.state.stats.main_searches} main / {manager.state.stats.backup_searches} backup searches"
    )
    return events


def write_events(events: Iterable[Event], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ev in events:
            f.write(json.dumps(ev.to_json()) + "\n")
