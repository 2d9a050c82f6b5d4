import csv
import logging
import random
import subprocess  # nosec B404
import sys
from typing import Tuple

import pytest

from lamsh.core.errors import SignatureError, StreamConsumedError
from lamsh.models.values import ByteStreamValue, LineSeqValue, ListValue, TextReaderValue
from lamsh.prelude import builtins, register_conversion, register_host_function
from lamsh.prelude.registry import describe
from lamsh.schemas.result import Diagnostic
from lamsh.shell.session import Session
from lamsh.streaming.pump import open_text

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1


def first_column(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return [row[0] for row in csv.reader(handle)]


REFERENCE_DISTINCT = """
import csv, sys
seen = {}
with open(sys.argv[1], newline="", encoding="utf-8") as handle:
    for row in csv.reader(handle):
        seen.setdefault(row[0], None)
sys.stdout.write("".join(name + "\\n" for name in seen))
"""

# argument type -> functions accepting it
PIPE_FUNCTIONS = {
    "Int": ["toStr", "toFloat", "(x -> (x * 2))", "(max 7)", "(x -> (pair x x))"],
    "Str": ["toInt"],
    "Bool": ["not", "(b -> (b && true))"],
}


def random_operand(rng: random.Random) -> Tuple[str, str]:
    kind = rng.choice(sorted(PIPE_FUNCTIONS))
    if kind == "Int":
        value = str(rng.randint(-1000, 1000))
    elif kind == "Str":
        value = f'"{rng.randint(0, 10 ** 6)}"'
    else:
        value = rng.choice(["true", "false"])
    return kind, value


@pytest.mark.unit
class TestIntegerHelpers:
    def test_wrap(self):
        assert builtins.wrap_int(2 ** 63) == INT_MIN
        assert builtins.wrap_int(-(2 ** 63) - 1) == INT_MAX
        assert builtins.wrap_int(5) == 5

    def test_add_overflows(self):
        assert builtins.int_add(INT_MAX, 1) == INT_MIN

    def test_multiply_overflows(self):
        assert builtins.int_multiply(2 ** 62, 4) == 0

    @pytest.mark.parametrize("a, b, q", [(7, 2, 3), (-7, 2, -3), (7, -2, -3), (-7, -2, 3)])
    def test_divide_truncates(self, a, b, q):
        assert builtins.int_divide(a, b) == q

    def test_divide_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            builtins.int_divide(1, 0)
        with pytest.raises(ZeroDivisionError):
            builtins.float_divide(1.0, 0.0)


@pytest.mark.unit
class TestScalarConversions:
    def test_to_int(self):
        assert builtins.to_int(" 42 ") == 42
        assert builtins.to_int_radix("ff", 16) == 255

    def test_to_int_rejects_text(self):
        with pytest.raises(ValueError):
            builtins.to_int("abc")

    def test_to_str(self):
        assert builtins.to_str(True) == "true"
        assert builtins.to_str(12) == "12"


@pytest.mark.unit
class TestTextHelpers:
    def test_parse_csv(self):
        rows = builtins.parse_csv(TextReaderValue(text='a,b\n"c,d",e\n'))
        assert [list(row) for row in rows] == [["a", "b"], ["c,d", "e"]]

    def test_lines_are_reiterable(self):
        rows = builtins.parse_csv(TextReaderValue(text="a\nb\n"))
        assert builtins.count_items(rows) == 2
        assert builtins.count_items(rows) == 2

    def test_element_at_out_of_range(self):
        rows = builtins.parse_csv(TextReaderValue(text="a\n"))
        with pytest.raises(IndexError):
            list(builtins.element_at(3, rows))

    def test_distinct_keeps_first_occurrence_order(self):
        lines = LineSeqValue(producer=lambda: iter(["b", "a", "b", "c", "a"]))
        assert list(builtins.distinct(lines)) == ["b", "a", "c"]

    def test_cat_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            builtins.cat(str(tmp_path / "missing.csv"))

    def test_cat_reads_lazily(self, csv_path):
        reader = builtins.cat(str(csv_path))
        assert reader.path == str(csv_path)
        assert open_text(reader).startswith("beta,1,")

    def test_echo_adds_newline(self):
        assert builtins.echo("hi").text == "hi\n"

    def test_lines_to_stream(self):
        lines = LineSeqValue(producer=lambda: iter(["x", "y"]))
        assert builtins.lines_to_stream(lines).data == b"x\ny\n"

    def test_stream_lines_rerun_per_iteration(self):
        stream = ByteStreamValue(data=b"a\nb\n")
        lines = builtins.to_lines(stream)
        assert list(lines) == ["a", "b"]
        assert list(lines) == ["a", "b"]
        assert stream.consumed
        with pytest.raises(StreamConsumedError):
            builtins.to_lines(stream)

    def test_reader_over_stream_rereads(self):
        stream = ByteStreamValue(data=b"r\n")
        reader = builtins.stream_to_reader(stream)
        assert open_text(reader) == open_text(reader) == "r\n"
        assert builtins.reader_to_stream(reader).consumed is False


@pytest.mark.unit
class TestInstalledPrelude:
    def test_overloads_described(self, prelude_env):
        assert describe(prelude_env, "toInt") == ["toInt : Str -> Int", "toInt : Str -> Int -> Int"]

    def test_consumers_gain_conversion_overloads(self, prelude_env):
        assert describe(prelude_env, "count") == [
            "count : LineSeq a -> Int",
            "count : Stream -> Int",
            "count : TextReader -> Int",
        ]

    def test_pipe_operator(self, prelude_env):
        assert describe(prelude_env, "|") == ["| : a -> (a -> b) -> b"]
        assert prelude_env.attributes("|").is_infix

    def test_conversions_sorted_by_priority(self, prelude_env):
        priorities = [c.priority for c in prelude_env.conversions]
        assert priorities == sorted(priorities)

    def test_pipe_is_reverse_application(self, session):
        piped = session.eval_line('"123" | toInt')
        direct = session.eval_line('toInt "123"')
        assert piped.text == direct.text == "123 : Int\n"

    def test_csv_distinct_count(self, session, csv_path):
        expected = len(set(first_column(csv_path)))
        line = f'count (distinct (elementAt 0 (pcsv (cat "{csv_path}"))))'
        assert session.eval_line(line).text == f"{expected} : Int\n"

    def test_csv_pipeline_matches_nested_form(self, session, csv_path):
        nested = session.eval_line(f'count (distinct (elementAt 0 (pcsv (cat "{csv_path}"))))')
        piped = session.eval_line(f'cat "{csv_path}" | pcsv | elementAt 0 | distinct | count')
        assert piped.text == nested.text == "7 : Int\n"

    def test_csv_distinct_lines(self, session, csv_path):
        names = list(dict.fromkeys(first_column(csv_path)))
        rendered = session.eval_line(f'cat "{csv_path}" | pcsv | elementAt 0 | distinct')
        assert rendered.text == "".join(f"{name}\n" for name in names) + ": LineSeq Str\n"

    def test_row_count(self, session, csv_path):
        assert session.eval_line(f'count (pcsv (cat "{csv_path}"))').text == "100 : Int\n"


@pytest.mark.unit
class TestRegistration:
    def test_custom_host_function(self, prelude_env):
        env = register_host_function(prelude_env, "twice", "Int -> Int", lambda n: n * 2)
        assert Session(env=env).eval_line("twice 21").text == "42 : Int\n"

    def test_reader_consumer_accepts_writer(self, prelude_env):
        env = register_host_function(prelude_env, "shout", "TextReader -> Str", lambda r: open_text(r).upper())
        assert len(describe(env, "shout")) == 3
        assert Session(env=env).eval_line('shout (echo "hi")').text == '"HI\\n" : Str\n'

    def test_needs_a_parameter(self, prelude_env):
        with pytest.raises(SignatureError):
            register_host_function(prelude_env, "k", "Int", lambda: 1)

    def test_environment_is_persistent(self, prelude_env):
        register_host_function(prelude_env, "twice", "Int -> Int", lambda n: n * 2)
        assert prelude_env.lookup("twice") is None

    def test_list_values(self):
        assert len(ListValue(items=("a", "b"))) == 2


@pytest.mark.unit
class TestConversionRegistration:
    def test_same_source_and_target(self, prelude_env):
        with pytest.raises(SignatureError) as info:
            register_conversion(prelude_env, "Stream", "Stream", lambda s: s, 1, "same")
        assert "to itself" in info.value.message

    @pytest.mark.parametrize("source, target", [("Int", "Str"), ("Stream", "Int"), ("List Str", "LineSeq Str")])
    def test_both_sides_are_stream_types(self, prelude_env, source, target):
        with pytest.raises(SignatureError) as info:
            register_conversion(prelude_env, source, target, lambda v: v, 4, "bad")
        assert "is not a stream type" in info.value.message
        assert "LineSeq" in info.value.hint

    def test_duplicate_pair_replaces_and_warns(self, prelude_env, caplog):
        with caplog.at_level(logging.WARNING):
            env = register_conversion(prelude_env, "Stream", "TextReader", builtins.stream_to_reader, 5, "sreader2")
        assert "conversion sreader replaced by sreader2" in caplog.text
        names = [c.name for c in env.conversions]
        assert "sreader2" in names
        assert "sreader" not in names
        assert len(env.conversions) == len(prelude_env.conversions)
        assert describe(env, "sreader2") == ["sreader2 : Stream -> TextReader"]

    def test_new_pair_is_added(self, prelude_env):
        env = register_conversion(prelude_env, "TextWriter", "LineSeq Str", builtins.to_lines, 4, "wlines")
        assert len(env.conversions) == len(prelude_env.conversions) + 1
        assert [c.priority for c in env.conversions] == sorted(c.priority for c in env.conversions)


@pytest.mark.unit
class TestPipeLaw:
    def test_pipe_equals_application(self, session):
        rng = random.Random(3)
        for _ in range(200):
            kind, value = random_operand(rng)
            function = rng.choice(PIPE_FUNCTIONS[kind])
            piped = session.eval_line(f"{value} | {function}")
            direct = session.eval_line(f"{function} {value}")
            assert not isinstance(direct, Diagnostic), f"{function} {value}"
            assert piped == direct, f"{value} | {function}"


@pytest.mark.integration
def test_csv_distinct_matches_reference_script(session, csv_path):
    reference = subprocess.run(  # nosec B603
        [sys.executable, "-c", REFERENCE_DISTINCT, str(csv_path)],
        capture_output=True,
        text=True,
        check=True,
    )
    rendered = session.eval_line(f'cat "{csv_path}" | pcsv | elementAt 0 | distinct')
    assert rendered.text == reference.stdout + ": LineSeq Str\n"
