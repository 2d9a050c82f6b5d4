import os
import shutil

import pytest

from lamsh.adapters.base import ProcessAdapter
from lamsh.adapters.factory import AdapterFactory
from lamsh.adapters.subprocess_adapter import SubprocessAdapter
from lamsh.core.config import settings
from lamsh.core.errors import EvalError, NoConversion, SpawnError, StreamConsumedError
from lamsh.models.expression import (
    INT,
    LINE_SEQ,
    STR,
    STREAM,
    TEXT_WRITER,
    Constant,
    apply_type,
    format_type,
)
from lamsh.models.values import ByteStreamValue, TextReaderValue, TextWriterValue
from lamsh.repositories.commands import CommandRepository
from lamsh.schemas.command import CommandResult, CommandSpec, PipelinePlan, Stage
from lamsh.services.commands import command_overloads, wrap_command
from lamsh.services.conversions import adapt_stream
from lamsh.streaming.pump import StreamHandle, iter_lines, run_plan, streaming_manager, text_of
from tests.conftest import require_tools


def stage(name, *arguments):
    return Stage(spec=CommandSpec(name=name, path=shutil.which(name) or name), arguments=arguments)


def signatures(overloads):
    return [format_type(o.scheme.body, {}) for o in overloads]


@pytest.mark.unit
class TestAdaptStream:
    def test_same_type_passes_through(self, prelude_env):
        value = Constant(value=ByteStreamValue(data=b"x"), annotation=STREAM)
        assert adapt_stream(value, STREAM, prelude_env) is value

    def test_writer_to_stream(self, prelude_env):
        value = Constant(value=TextWriterValue(text="a\n"), annotation=TEXT_WRITER)
        adapted = adapt_stream(value, STREAM, prelude_env)
        assert adapted.annotation == STREAM
        assert adapted.value.data == b"a\n"

    def test_writer_to_lines_is_not_chained(self, prelude_env):
        value = Constant(value=TextWriterValue(text="a\n"), annotation=TEXT_WRITER)
        with pytest.raises(NoConversion):
            adapt_stream(value, apply_type(LINE_SEQ, STR), prelude_env)

    def test_scalars_do_not_convert(self, prelude_env):
        with pytest.raises(NoConversion) as info:
            adapt_stream(Constant(value=1, annotation=INT), STREAM, prelude_env)
        assert info.value.hint


@pytest.mark.unit
class TestWrapCommand:
    spec = CommandSpec(name="wc", path="/usr/bin/wc")

    def test_one_overload_per_stream_conversion(self, prelude_env):
        overloads = wrap_command(self.spec, prelude_env)
        assert signatures(overloads) == [
            "Stream -> Stream",
            "TextWriter -> Stream",
            "TextReader -> Stream",
            "LineSeq Str -> Stream",
        ]
        assert [o.conversion_priority for o in overloads] == [1, 2, 2, 3]

    def test_leading_arguments_and_standalone(self, prelude_env):
        overloads = wrap_command(self.spec, prelude_env, leading_args=1, standalone=True)
        assert signatures(overloads)[0] == "Str -> Stream -> Stream"
        assert signatures(overloads)[-1] == "Str -> Stream"
        assert overloads[-1].conversion_priority == 4
        assert overloads[-1].value.input_type is None

    def test_use_site_offers_both_splits(self, prelude_env):
        overloads = command_overloads(self.spec, prelude_env, 1)
        assert len(overloads) == 9
        assert signatures(overloads)[0] == "Stream -> Stream"
        assert signatures(overloads)[4] == "Str -> Stream -> Stream"
        assert signatures(overloads)[-1] == "Str -> Stream"
        assert overloads[-1].conversion_priority == 4

    def test_no_arguments(self, prelude_env):
        overloads = command_overloads(self.spec, prelude_env, 0)
        assert len(overloads) == 5
        assert signatures(overloads)[-1] == "Stream"


@pytest.mark.unit
class TestCommandRepository:
    def make_tool(self, directory, name, mode=0o755):
        path = directory / name
        path.write_text("#!/bin/sh\necho tool\n")
        path.chmod(mode)
        return path

    def test_finds_executables(self, tmp_path):
        path = self.make_tool(tmp_path, "mytool")
        spec = CommandRepository([str(tmp_path)]).get_by_name("mytool")
        assert spec is not None
        assert spec.path == str(path)
        assert spec.argv(("a",)) == (str(path), "a")

    def test_skips_non_executables(self, tmp_path):
        self.make_tool(tmp_path, "plain", mode=0o644)
        assert CommandRepository([str(tmp_path)]).get_by_name("plain") is None

    @pytest.mark.parametrize("name", ["", "a/b", "+", "->"])
    def test_rejects_non_command_names(self, tmp_path, name):
        assert CommandRepository([str(tmp_path)]).get_by_name(name) is None

    def test_first_directory_wins(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        first.mkdir()
        second.mkdir()
        self.make_tool(second, "dup")
        winner = self.make_tool(first, "dup")
        assert CommandRepository([str(first), str(second)]).get_by_name("dup").path == str(winner)

    def test_memo_drops_when_directory_changes(self, tmp_path):
        repository = CommandRepository([str(tmp_path)])
        assert repository.get_by_name("later") is None
        self.make_tool(tmp_path, "later")
        stat = os.stat(tmp_path)
        os.utime(tmp_path, (stat.st_atime, stat.st_mtime + 10))
        assert repository.exists("later")

    def test_all_names(self, tmp_path):
        self.make_tool(tmp_path, "one")
        self.make_tool(tmp_path, "two")
        self.make_tool(tmp_path, "three", mode=0o644)
        assert CommandRepository([str(tmp_path)]).get_all_names() == ["one", "two"]


@pytest.mark.unit
class TestStreamValues:
    def test_handle_is_single_use(self):
        handle = StreamHandle(ByteStreamValue(data=b"x"))
        assert handle.read() == b"x"
        with pytest.raises(StreamConsumedError) as info:
            handle.read()
        assert "bind the command" in info.value.hint

    def test_consumed_mark_lives_on_the_value(self):
        value = ByteStreamValue(data=b"x")
        assert StreamHandle(value).read() == b"x"
        assert value.consumed
        with pytest.raises(StreamConsumedError):
            StreamHandle(value).read()
        assert StreamHandle(value.reopen()).read() == b"x"

    def test_take_hands_over_an_unread_copy(self):
        value = ByteStreamValue(data=b"y")
        copy = StreamHandle(value).take()
        assert value.consumed
        assert not copy.consumed
        assert copy.data == b"y"
        with pytest.raises(StreamConsumedError):
            StreamHandle(value).take()

    def test_text_of_writer_and_reader(self):
        assert text_of(TextWriterValue(text="w")) == "w"
        assert text_of(TextReaderValue(text="r")) == "r"

    def test_iter_lines(self):
        assert list(iter_lines(ByteStreamValue(data=b"a\nb\n"))) == ["a", "b"]

    def test_factory(self):
        assert isinstance(AdapterFactory.get_adapter("subprocess"), SubprocessAdapter)
        assert AdapterFactory.get_adapter("nope") is None
        assert "subprocess" in AdapterFactory.get_available_providers()


class RecordingAdapter(ProcessAdapter):
    def __init__(self):
        self.calls = []
        self.running = []

    def spawn_pipeline(self, stages, source=None, sink=None):
        self.calls.append((tuple(s.argv for s in stages), source))
        self.running.append(streaming_manager.get_active_pipelines_count())
        if sink is not None:
            sink(b"out")
        return [CommandResult(exit_code=0), CommandResult(exit_code=7, stdout=b"" if sink else b"out")]

    def cancel(self):
        pass

    def is_available(self):
        return True


@pytest.mark.unit
class TestRunPlan:
    @pytest.fixture
    def recording(self, mocker):
        mocker.patch.dict(AdapterFactory._adapters)
        adapter = RecordingAdapter()
        AdapterFactory.register_adapter("recording", adapter)
        mocker.patch.object(settings, "PROCESS_ADAPTER", "recording")
        return adapter

    def test_uses_configured_adapter(self, recording):
        plan = PipelinePlan(stages=(stage("a", "x"), stage("b")), source=b"in")
        results = run_plan(plan)
        assert recording.calls == [(((stage("a").spec.path, "x"), (stage("b").spec.path,)), b"in")]
        assert results[-1].stdout == b"out"
        assert streaming_manager.last_status.code == 7

    def test_pipeline_is_active_while_running(self, recording):
        pipeline = PipelinePlan(stages=(stage("a"),))
        run_plan(pipeline)
        assert recording.running == [1]
        assert streaming_manager.get_active_pipelines_count() == 0

    def test_handle_streams_into_sink(self, recording):
        handle = StreamHandle(ByteStreamValue(plan=PipelinePlan(stages=(stage("a"),))))
        assert handle.read() == b"out"

    def test_unknown_adapter(self, mocker):
        mocker.patch.object(settings, "PROCESS_ADAPTER", "missing")
        with pytest.raises(EvalError) as info:
            run_plan(PipelinePlan(stages=(stage("a"),)))
        assert "subprocess" in info.value.hint


@pytest.mark.integration
class TestSubprocessAdapter:
    @require_tools("printf", "wc")
    def test_two_stage_pipeline(self):
        results = SubprocessAdapter().spawn_pipeline([stage("printf", "a\\nb\\n"), stage("wc", "-l")])
        assert len(results) == 2
        assert results[-1].stdout.strip() == b"2"
        assert all(result.succeeded for result in results)

    @require_tools("cat")
    def test_source_feeds_first_stage(self):
        results = SubprocessAdapter().spawn_pipeline([stage("cat")], source=b"hello")
        assert results[-1].stdout == b"hello"

    @require_tools("cat")
    def test_sink_receives_output(self):
        chunks = []
        results = SubprocessAdapter(chunk_size=4).spawn_pipeline([stage("cat")], source=b"0123456789", sink=chunks.append)
        assert b"".join(chunks) == b"0123456789"
        assert results[-1].stdout == b""

    @require_tools("cat")
    def test_empty_stdin_without_source(self):
        results = SubprocessAdapter().spawn_pipeline([stage("cat")])
        assert results[-1].stdout == b""

    @require_tools("sh")
    def test_exit_code_and_stderr(self):
        results = SubprocessAdapter().spawn_pipeline([stage("sh", "-c", "echo oops >&2; exit 3")])
        assert results[-1].exit_code == 3
        assert results[-1].stderr == "oops\n"

    @require_tools("yes", "head")
    def test_early_exit_downstream_is_a_broken_pipe(self):
        results = SubprocessAdapter().spawn_pipeline([stage("yes"), stage("head", "-n", "1")])
        assert results[-1].stdout == b"y\n"
        assert results[0].broken_pipe

    def test_missing_executable(self):
        with pytest.raises(SpawnError) as info:
            SubprocessAdapter().spawn_pipeline([Stage(spec=CommandSpec(name="nope", path="/nonexistent/nope"))])
        assert info.value.stage_index == 0

    @require_tools("sh")
    def test_run_plan_records_status(self):
        run_plan(PipelinePlan(stages=(stage("sh", "-c", "exit 5"),)))
        assert streaming_manager.last_status.code == 5
        assert streaming_manager.get_active_pipelines_count() == 0
