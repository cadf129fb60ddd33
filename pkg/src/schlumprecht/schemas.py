"""Request and response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from .vectors import SparseVector, parse_vector

BuildKind = Literal["constant-block", "yardstick", "l1-average", "yardstick-average", "interleaved"]


class VectorInput(BaseModel):
    """A vector as ``[[index, value], ...]`` pairs or as ``index:value`` text."""

    vector: Optional[list[tuple[int, float | str]]] = None
    text: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if self.vector is not None and self.text is not None:
            raise ValueError("give either 'vector' or 'text', not both")
        return self

    def to_vector(self) -> SparseVector:
        if self.text is not None:
            return parse_vector(self.text)
        return SparseVector.from_pairs(self.vector or [])


class NormRequest(VectorInput):
    certified: bool = False
    oracle: bool = False
    max_support: Optional[int] = Field(default=None, ge=1)


class NormResponse(BaseModel):
    value: float
    certificate: Optional[dict[str, Any]] = None
    enclosure: Optional[tuple[float, float]] = None
    oracle_value: Optional[float] = None
    support_size: int
    timing: float


class SplitSumRequest(VectorInput):
    r: int = Field(ge=1)
    max_support: Optional[int] = Field(default=None, ge=1)


class SplitSumResponse(BaseModel):
    value: float
    pieces: list[tuple[int, int]]
    timing: float


class LevelNormRequest(VectorInput):
    t: int = Field(ge=0)
    max_support: Optional[int] = Field(default=None, ge=1)


class LevelNormResponse(BaseModel):
    value: float
    timing: float


class BuildSpec(BaseModel):
    kind: BuildKind
    n: Optional[int] = Field(default=None, ge=1)
    q: Optional[list[int]] = None
    m: Optional[int] = Field(default=None, ge=1)
    start: int = Field(default=1, ge=1)
    count: Optional[int] = Field(default=None, ge=1)
    n_seq: Optional[list[int]] = None
    length: Optional[int] = Field(default=None, ge=1)
    normalized: bool = True
    block_length: int = Field(default=1, ge=1)
    q_base: int = Field(default=2, ge=2)


class VectorRecord(BaseModel):
    name: str
    entries: list[tuple[int, float]]
    support: Optional[tuple[int, int]] = None
    card: int
    norm: float
    block: Optional[int] = None


class BuildResponse(BaseModel):
    kind: BuildKind
    parameters: dict[str, Any]
    vectors: list[VectorRecord]
    extra: dict[str, Any] = Field(default_factory=dict)

    def manifest(self) -> dict[str, Any]:
        """Everything except the coefficients."""
        data = self.model_dump(mode="json")
        for v in data["vectors"]:
            v.pop("entries")
        return data


class CheckRequest(BaseModel):
    suite: str
    seed: int = 0
    tolerance: float = Field(default=1e-10, gt=0)
    config: dict[str, Any] = Field(default_factory=dict)
    workers: int = Field(default=1, ge=1)


class CheckItemModel(BaseModel):
    k: int
    measured: float
    bound: float
    pass_: bool = Field(alias="pass")
    label: Optional[str] = None


class CheckReportModel(BaseModel):
    name: str
    pass_: bool = Field(alias="pass")
    items: list[CheckItemModel]
    notes: str = ""


class CheckResponse(BaseModel):
    """``body`` is deterministic given the request; ``meta`` is not."""

    body: dict[str, Any]
    meta: dict[str, Any]


class ReportRequest(BaseModel):
    suites: Optional[list[str]] = None
    seed: int = 0
    tolerance: float = Field(default=1e-10, gt=0)
    workers: int = Field(default=1, ge=1)
