import pytest

from lamsh.core.errors import InferError, UnifyError
from lamsh.engine.inference import infer
from lamsh.engine.lexer import tokenize
from lamsh.engine.parser import parse_annotated
from lamsh.engine.rewrite import normalize
from lamsh.engine.typesys import ResolutionMode
from lamsh.models.expression import CommandTerm, HostFunctionTerm, format_type
from lamsh.schemas.command import CommandSpec
from lamsh.services.commands import command_overloads

TOOL = CommandSpec(name="tool", path="/opt/bin/tool")


def tool_lookup(env):
    def lookup(name, arg_count):
        if name != TOOL.name:
            return None
        return command_overloads(TOOL, env, arg_count)

    return lookup


def typed(source, env, mode=ResolutionMode.REPL, command_lookup=None):
    expr = normalize(parse_annotated(tokenize(source)), env)
    return infer(expr, env, mode=mode, command_lookup=command_lookup)


def type_of(source, env, mode=ResolutionMode.REPL):
    return format_type(typed(source, env, mode).annotation, {})


@pytest.mark.unit
class TestInferTypes:
    @pytest.mark.parametrize(
        "source, expected",
        [
            ("42", "Int"),
            ("2.5", "Float"),
            ('"s"', "Str"),
            ("true", "Bool"),
            ("1 + 2 * 3", "Int"),
            ("1.5 + 2.0", "Float"),
            ("x -> x", "a -> a"),
            ("f -> (x -> (f (f x)))", "(a -> a) -> a -> a"),
            ('pair 1 "a"', "Pair Int Str"),
            ('fst (pair 1 "a")', "Int"),
            ("(x : Int) -> x", "Int -> Int"),
            ('toInt "ff" 16', "Int"),
            ("not (1 == 2)", "Bool"),
            ("echo \"hi\"", "TextWriter"),
            ("Int", "*"),
        ],
    )
    def test_types(self, prelude_env, source, expected):
        assert type_of(source, prelude_env) == expected

    def test_every_node_annotated(self, prelude_env):
        expr = typed("(x -> (x + 1)) 41", prelude_env)
        assert expr.annotation is not None
        assert expr.function.annotation is not None
        assert expr.argument.annotation is not None

    def test_overloaded_name_replaced_by_choice(self, prelude_env):
        expr = typed("1 + 2", prelude_env)
        head = expr.function.function
        assert isinstance(head, HostFunctionTerm)
        assert format_type(head.annotation) == "Int -> Int -> Int"


@pytest.mark.unit
class TestResolutionModes:
    def test_repl_picks_literal_result(self, prelude_env):
        assert type_of("a -> (b -> (a + b))", prelude_env) == "Int -> Int -> Int"

    def test_script_reports_ambiguity(self, prelude_env):
        with pytest.raises(InferError) as info:
            typed("a -> (b -> (a + b))", prelude_env, ResolutionMode.SCRIPT)
        assert info.value.reason == InferError.AMBIGUOUS
        assert "annotation" in info.value.hint

    def test_annotation_resolves_in_script(self, prelude_env):
        source = "(a -> (b -> (a + b))) : Float -> Float -> Float"
        assert type_of(source, prelude_env, ResolutionMode.SCRIPT) == "Float -> Float -> Float"

    def test_repl_to_int_single_argument(self, prelude_env):
        assert type_of('toInt "123"', prelude_env) == "Int"

    def test_script_to_int_single_argument_is_ambiguous(self, prelude_env):
        with pytest.raises(InferError):
            typed('toInt "123"', prelude_env, ResolutionMode.SCRIPT)


@pytest.mark.unit
class TestInferErrors:
    def test_unbound(self, prelude_env):
        with pytest.raises(InferError) as info:
            typed("nosuchname_zz", prelude_env)
        assert info.value.reason == InferError.UNBOUND
        assert info.value.span == (0, 13)

    def test_mismatch(self, prelude_env):
        with pytest.raises(UnifyError) as info:
            typed("not 1", prelude_env)
        assert info.value.reason == UnifyError.MISMATCH

    def test_self_application(self, prelude_env):
        with pytest.raises(UnifyError) as info:
            typed("x -> (x x)", prelude_env)
        assert info.value.reason == UnifyError.OCCURS

    def test_no_overload_fits(self, prelude_env):
        with pytest.raises(InferError) as info:
            typed('toStr "s"', prelude_env)
        assert info.value.reason == InferError.NO_MATCH
        assert info.value.hint.startswith("available:")

    def test_annotated_literal_must_agree(self, prelude_env):
        with pytest.raises(UnifyError):
            typed("(1 : Str)", prelude_env)

    def test_equals_is_not_an_expression(self, prelude_env):
        with pytest.raises(InferError) as info:
            typed("1 = 2", prelude_env)
        assert info.value.reason == InferError.SYNTAX

    def test_lambda_parameter_must_be_a_name(self, prelude_env):
        with pytest.raises(InferError) as info:
            typed("1 -> 2", prelude_env)
        assert info.value.reason == InferError.SYNTAX

    def test_unknown_annotation_type(self, prelude_env):
        with pytest.raises(InferError) as info:
            typed("(1 : Nope)", prelude_env)
        assert info.value.reason == InferError.ANNOTATION


@pytest.mark.unit
class TestCommandSites:
    def test_arguments_only_runs_standalone(self, prelude_env):
        expr = typed('tool "x"', prelude_env, command_lookup=tool_lookup(prelude_env))
        assert format_type(expr.annotation) == "Stream"
        assert isinstance(expr.function, CommandTerm)
        assert expr.function.input_type is None
        assert expr.function.leading == 1

    def test_piped_input_picks_conversion(self, prelude_env):
        expr = typed('echo "hi" | tool', prelude_env, command_lookup=tool_lookup(prelude_env))
        assert format_type(expr.annotation) == "Stream"

    def test_piped_input_with_argument_in_script_mode(self, prelude_env):
        expr = typed(
            'echo "hi" | tool "-n"',
            prelude_env,
            ResolutionMode.SCRIPT,
            command_lookup=tool_lookup(prelude_env),
        )
        assert format_type(expr.annotation) == "Stream"

    def test_command_into_line_function(self, prelude_env):
        expr = typed("tool | count", prelude_env, command_lookup=tool_lookup(prelude_env))
        assert format_type(expr.annotation) == "Int"
