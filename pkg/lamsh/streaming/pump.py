"""Consuming stream values: running their pipelines and turning bytes into text."""
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional
import logging
import uuid

from lamsh.adapters.factory import AdapterFactory
from lamsh.core.config import settings
from lamsh.core.errors import EvalError, StreamConsumedError
from lamsh.models.values import ByteStreamValue, ExitStatusValue, TextReaderValue, TextWriterValue
from lamsh.schemas.command import CommandResult, PipelinePlan

logger = logging.getLogger(__name__)


class StreamingManager:
    """Tracks running pipelines and the outcome of the last one."""

    def __init__(self):
        self.active_pipelines: Dict[str, PipelinePlan] = {}
        self.last_results: List[CommandResult] = []

    def register_pipeline(self, pipeline_id: str, plan: PipelinePlan) -> None:
        self.active_pipelines[pipeline_id] = plan

    def remove_pipeline(self, pipeline_id: str) -> None:
        if pipeline_id in self.active_pipelines:
            del self.active_pipelines[pipeline_id]

    def get_active_pipelines_count(self) -> int:
        return len(self.active_pipelines)

    def record(self, results: List[CommandResult]) -> None:
        self.last_results = list(results)

    @property
    def last_status(self) -> Optional[ExitStatusValue]:
        """Exit status of the last stage of the last pipeline, if any ran."""
        if not self.last_results:
            return None
        return ExitStatusValue(code=self.last_results[-1].exit_code)

    def cancel_all(self) -> None:
        if not self.active_pipelines:
            return
        adapter = AdapterFactory.get_adapter()
        if adapter is not None:
            adapter.cancel()


streaming_manager = StreamingManager()


def run_plan(plan: PipelinePlan, sink: Optional[Callable[[bytes], None]] = None) -> List[CommandResult]:
    """Execute ``plan`` with the configured process adapter."""
    adapter = AdapterFactory.get_adapter()
    if adapter is None:
        raise EvalError(
            f"unknown process adapter {settings.PROCESS_ADAPTER!r}",
            reason=EvalError.HOST,
            hint=f"available: {', '.join(AdapterFactory.get_available_providers())}",
        )
    pipeline_id = uuid.uuid4().hex
    streaming_manager.register_pipeline(pipeline_id, plan)
    try:
        results = adapter.spawn_pipeline(plan.stages, plan.source, sink)
    finally:
        streaming_manager.remove_pipeline(pipeline_id)
    streaming_manager.record(results)
    for index, result in enumerate(results):
        if result.stderr:
            logger.debug(f"[PROC] stage {index} stderr: {result.stderr.rstrip()}")
    return results


class StreamHandle:
    """One-shot reader over a byte stream value.

    The consumed mark lives on the value, so every handle over it sees it.
    """

    def __init__(self, value: ByteStreamValue):
        self.value = value

    @property
    def consumed(self) -> bool:
        return self.value.consumed

    def _claim(self) -> None:
        if self.value.consumed:
            raise StreamConsumedError(
                "stream was already consumed",
                hint="bind the command itself and apply it again",
            )
        self.value.mark_consumed()

    def take(self) -> ByteStreamValue:
        """Claim the value for a consumer that reads it later, maybe more than once."""
        self._claim()
        return self.value.reopen()

    def read(self) -> bytes:
        chunks: List[bytes] = []
        self.pipe_to(chunks.append)
        return b"".join(chunks)

    def pipe_to(self, sink: Callable[[bytes], None]) -> None:
        """Send every chunk to ``sink`` as it arrives."""
        self._claim()
        if self.value.plan is None:
            if self.value.data:
                sink(self.value.data)
            return
        run_plan(self.value.plan, sink)


def drain_stream(value: ByteStreamValue) -> bytes:
    return StreamHandle(value).read()


def decode(data: bytes) -> str:
    return data.decode(settings.ENCODING, errors="replace")


def open_text(reader: TextReaderValue) -> str:
    """Full text behind a reader."""
    if reader.path is not None:
        try:
            return Path(reader.path).read_text(encoding=settings.ENCODING)
        except OSError as e:
            raise EvalError(f"cannot read {reader.path!r}: {e.strerror or e}", reason=EvalError.HOST) from e
    if reader.stream is not None:
        return decode(drain_stream(reader.stream.reopen()))
    return reader.text or ""


def text_of(value: object) -> str:
    """Text content of any stream-like host value."""
    if isinstance(value, ByteStreamValue):
        return decode(drain_stream(value))
    if isinstance(value, TextReaderValue):
        return open_text(value)
    if isinstance(value, TextWriterValue):
        return value.text
    raise EvalError(f"{value} is not a text source", reason=EvalError.HOST)


def iter_lines(value: object) -> Iterator[str]:
    """Lines of a stream-like value, without line terminators."""
    yield from text_of(value).splitlines()
