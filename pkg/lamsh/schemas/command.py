from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class CommandSpec(BaseModel):
    """A resolved external command."""
    model_config = ConfigDict(frozen=True)

    name: str
    path: str
    leading_args: Tuple[str, ...] = ()

    def argv(self, arguments: Tuple[str, ...] = ()) -> Tuple[str, ...]:
        return (self.path, *self.leading_args, *arguments)


class Stage(BaseModel):
    """One process in a pipeline."""
    model_config = ConfigDict(frozen=True)

    spec: CommandSpec
    arguments: Tuple[str, ...] = ()

    @property
    def argv(self) -> Tuple[str, ...]:
        return self.spec.argv(self.arguments)


class PipelinePlan(BaseModel):
    """Stages connected stdout to stdin, fed by ``source`` (None for an empty stdin)."""
    model_config = ConfigDict(frozen=True)

    stages: Tuple[Stage, ...] = Field(min_length=1)
    source: Optional[bytes] = None

    def then(self, stage: Stage) -> "PipelinePlan":
        return self.model_copy(update={"stages": (*self.stages, stage)})


class CommandResult(BaseModel):
    """Outcome of one pipeline stage."""
    exit_code: int
    stdout: bytes = b""
    stderr: str = ""
    broken_pipe: bool = False

    @property
    def succeeded(self) -> bool:
        return self.exit_code == 0
