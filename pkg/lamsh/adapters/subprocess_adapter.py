from typing import IO, List, Optional, Sequence
import logging
import signal
import subprocess  # nosec B404
import threading

from lamsh.adapters.base import ProcessAdapter, Sink
from lamsh.core.config import settings
from lamsh.core.errors import SpawnError
from lamsh.schemas.command import CommandResult, Stage

logger = logging.getLogger(__name__)


class _StageIO:
    """Per-stage bookkeeping filled in by the pump threads."""

    def __init__(self) -> None:
        self.stderr = b""
        self.broken_pipe = False


class SubprocessAdapter(ProcessAdapter):
    """Runs pipelines with ``subprocess.Popen`` and OS pipes."""

    def __init__(self, chunk_size: Optional[int] = None):
        self.chunk_size = chunk_size or settings.PIPE_CHUNK_SIZE
        self._processes: List[subprocess.Popen] = []
        self._lock = threading.Lock()

    def is_available(self) -> bool:
        return True

    def spawn_pipeline(
        self,
        stages: Sequence[Stage],
        source: Optional[bytes] = None,
        sink: Optional[Sink] = None,
    ) -> List[CommandResult]:
        if not stages:
            raise ValueError("a pipeline needs at least one stage")
        processes: List[subprocess.Popen] = []
        stage_io = [_StageIO() for _ in stages]
        threads: List[threading.Thread] = []
        previous: Optional[IO[bytes]] = None
        try:
            for index, stage in enumerate(stages):
                if index > 0:
                    stdin = previous
                elif source is None:
                    stdin = subprocess.DEVNULL
                else:
                    stdin = subprocess.PIPE
                try:
                    process = subprocess.Popen(  # nosec B603
                        list(stage.argv),
                        stdin=stdin,
                        stdout=subprocess.PIPE,
                        stderr=subprocess.PIPE,
                    )
                except OSError as e:
                    raise SpawnError(
                        f"cannot start {stage.spec.name!r}: {e.strerror or e}",
                        stage_index=index,
                    ) from e
                if previous is not None:
                    # the child owns its copy now
                    previous.close()
                previous = process.stdout
                processes.append(process)
                threads.append(self._start(self._collect_stderr, process.stderr, stage_io[index]))
            with self._lock:
                self._processes = processes
            # DEBUG: Log spawned pipeline (subprocess_adapter.py:spawn_pipeline)
            logger.info(f"[PROC] spawned {' | '.join(s.spec.name for s in stages)}")
            if source is not None:
                threads.append(self._start(self._feed, processes[0].stdin, source, stage_io[0]))
            output = self._drain(processes[-1].stdout, sink)
            for process in processes:
                process.wait()
            for thread in threads:
                thread.join()
        except BaseException:
            self._kill(processes)
            raise
        finally:
            with self._lock:
                self._processes = []
            for process in processes:
                for stream in (process.stdin, process.stdout, process.stderr):
                    if stream is not None and not stream.closed:
                        stream.close()
        return self._results(processes, stage_io, output)

    def cancel(self) -> None:
        with self._lock:
            processes = list(self._processes)
        logger.info(f"[PROC] cancelling {len(processes)} process(es)")
        self._kill(processes)

    # --- pumps ------------------------------------------------------------

    @staticmethod
    def _start(target, *args) -> threading.Thread:
        thread = threading.Thread(target=target, args=args, daemon=True)
        thread.start()
        return thread

    def _feed(self, stdin: IO[bytes], data: bytes, io: _StageIO) -> None:
        try:
            for start in range(0, len(data), self.chunk_size):
                stdin.write(data[start:start + self.chunk_size])
            stdin.close()
        except BrokenPipeError:
            io.broken_pipe = True
            logger.warning("[PROC] first stage closed its input early")
        except ValueError:
            pass

    def _collect_stderr(self, stderr: IO[bytes], io: _StageIO) -> None:
        io.stderr = stderr.read()

    def _drain(self, stdout: IO[bytes], sink: Optional[Sink]) -> bytes:
        chunks = []
        while True:
            chunk = stdout.read1(self.chunk_size)  # type: ignore[attr-defined]
            if not chunk:
                break
            if sink is None:
                chunks.append(chunk)
            else:
                sink(chunk)
        return b"".join(chunks)

    @staticmethod
    def _kill(processes: Sequence[subprocess.Popen]) -> None:
        for process in processes:
            if process.poll() is None:
                process.kill()
        for process in processes:
            try:
                process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                logger.error(f"[PROC] pid {process.pid} did not exit")

    @staticmethod
    def _results(
        processes: Sequence[subprocess.Popen],
        stage_io: Sequence[_StageIO],
        output: bytes,
    ) -> List[CommandResult]:
        results = []
        last = len(processes) - 1
        for index, (process, io) in enumerate(zip(processes, stage_io)):
            code = process.returncode
            broken = io.broken_pipe or (index < last and code == -signal.SIGPIPE)
            if broken:
                logger.warning(f"[PROC] stage {index} wrote to a closed pipe")
            results.append(
                CommandResult(
                    exit_code=code,
                    stdout=output if index == last else b"",
                    stderr=io.stderr.decode(settings.ENCODING, errors="replace"),
                    broken_pipe=broken,
                )
            )
        return results
