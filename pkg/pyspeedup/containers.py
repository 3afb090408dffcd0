"""Pydantic documents for the JSON formats of pyspeedup."""

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from pyspeedup.const import ClaimCheck, TaskKind


class VertexDocument(BaseModel):
    """Dataclass for one colored vertex.
    The value is a tagged term, see ``pyspeedup.complex.value_from_json``.
    """

    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=1)
    value: Any


class ComplexDocument(BaseModel):
    """Dataclass for a chromatic complex given by its facets."""

    n: int = Field(ge=1)
    facets: list[list[VertexDocument]]


class DeltaEntry(BaseModel):
    """One row of an explicit Δ map."""

    simplex: list[VertexDocument]
    images: list[list[VertexDocument]]


class TaskDocument(BaseModel):
    """Dataclass for a task.
    Either a named family with its parameters, or a custom task given
    extensionally by its complexes and Δ rows.
    """

    model_config = ConfigDict(extra="ignore")

    kind: TaskKind
    n: int | None = Field(None, ge=1)
    m: int | None = None
    eps_num: int | None = None
    inputs: ComplexDocument | None = None
    outputs: ComplexDocument | None = None
    delta: list[DeltaEntry] | None = None

    @model_validator(mode="after")
    def check_fields(self):
        """Require the parameters each kind needs."""
        if self.kind == TaskKind.CUSTOM:
            if self.inputs is None or self.outputs is None or self.delta is None:
                raise ValueError("custom tasks need inputs, outputs and delta")
            return self
        if self.n is None:
            raise ValueError(f"task kind '{self.kind}' needs n")
        if self.kind in (TaskKind.APPROX, TaskKind.LIBERAL_APPROX) and (
            self.m is None or self.eps_num is None
        ):
            raise ValueError(f"task kind '{self.kind}' needs m and eps_num")
        return self


class WitnessDocument(BaseModel):
    """Dataclass for a decision map, as protocol vertex -> output vertex pairs."""

    assignment: list[tuple[VertexDocument, VertexDocument]]


class ClaimSpec(BaseModel):
    """One entry of the claims manifest."""

    claim_id: str
    description: str
    check: ClaimCheck
    params: dict[str, Any] = Field(default_factory=dict)
    tolerance: Literal["exact"] = "exact"


class ClaimsManifest(BaseModel):
    """Dataclass for the checked-in claims corpus."""

    claims: list[ClaimSpec]


class ClaimOutcome(BaseModel):
    """Result of running one claim."""

    claim_id: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
