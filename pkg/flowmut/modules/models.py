from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator

from modules.mutant_reducer import ALL_RULES, ReductionRuleId
from modules.mutation_operators import ALL_OPERATORS, MutationOperatorId

MutantIds = Union[List[int], Dict[str, List[int]]]


def _check_ids(value: MutantIds) -> MutantIds:
    groups = value.values() if isinstance(value, dict) else [value]
    for ids in groups:
        for mutant_id in ids:
            if mutant_id <= 0:
                raise ValueError(f"mutant ids must be positive, got {mutant_id}")
    return value


class RunConfig(BaseModel):
    """Contents of flowmut.json after defaults and overrides are merged"""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    sources: List[Path]
    programs: List[str] = Field(default_factory=list)  # empty = every program in the sources
    tests: List[Path] = Field(default_factory=list)
    operators: List[MutationOperatorId] = Field(default_factory=lambda: list(ALL_OPERATORS))
    reduction_rules: List[ReductionRuleId] = Field(default_factory=lambda: list(ALL_RULES),
                                                   alias="reduction-rules")
    equivalent_mutants: MutantIds = Field(default_factory=list, alias="equivalent-mutants")
    force_mutants: MutantIds = Field(default_factory=list, alias="force-mutants")
    workers: PositiveInt = 1
    short_circuit: bool = Field(default=False, alias="short-circuit")
    out_dir: Path = Field(default=Path("flowmut-report"), alias="out-dir")

    @field_validator("equivalent_mutants", "force_mutants")
    @classmethod
    def _positive_ids(cls, value: MutantIds) -> MutantIds:
        return _check_ids(value)

    @field_validator("sources")
    @classmethod
    def _some_sources(cls, value: List[Path]) -> List[Path]:
        if not value:
            raise ValueError("at least one source file is required")
        return value

    def equivalent_for(self, program: str) -> List[int]:
        return _ids_for(self.equivalent_mutants, program)

    def forced_for(self, program: str) -> List[int]:
        return _ids_for(self.force_mutants, program)


def _ids_for(ids: MutantIds, program: str) -> List[int]:
    if isinstance(ids, dict):
        return sorted(set(ids.get(program, [])))
    return sorted(set(ids))


# ---------------------------------------------------------------------------
# Test suite files
# ---------------------------------------------------------------------------

class ExpectationModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    output: str
    mode: Literal["unordered", "ordered", "size"] = "unordered"
    values: Optional[List[Any]] = None
    size: Optional[int] = Field(default=None, ge=0)
    tolerance: float = Field(default=1e-9, ge=0.0)


class TestCaseModel(BaseModel):
    __test__ = False
    model_config = ConfigDict(extra="forbid")

    name: str
    inputs: Dict[str, List[Any]] = Field(default_factory=dict)
    expect: List[ExpectationModel] = Field(default_factory=list)


class TestSuiteFile(BaseModel):
    __test__ = False
    model_config = ConfigDict(extra="forbid")

    program: str
    tests: List[TestCaseModel] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# Report (report.json); field order is the serialized key order
# ---------------------------------------------------------------------------

class ScoreRecord(BaseModel):
    killed: int
    total: int
    equivalent: int
    removed: int
    ms: Optional[float]


class OperatorRecord(BaseModel):
    operator: MutationOperatorId
    generated: int
    equivalent: int
    removed: int
    killed_ratio: Optional[float]


class MutantRecord(BaseModel):
    id: int
    operator: MutationOperatorId
    sites: List[int]
    description: str
    original: str
    mutated: str
    status: str
    removed_by: Optional[str] = None
    killed_by: List[str] = Field(default_factory=list)
    executed_tests: int = 0


class TimingsRecord(BaseModel):
    generation_s: float = 0.0
    execution_s: float = 0.0
    total_s: float = 0.0


class MutationReport(BaseModel):
    tool_version: str
    source_hash: str
    program: str
    mutation_score: ScoreRecord
    operators: List[OperatorRecord]
    mutants: List[MutantRecord]
    timings: TimingsRecord = Field(default_factory=TimingsRecord)

    def mutant(self, mutant_id: int) -> Optional[MutantRecord]:
        for record in self.mutants:
            if record.id == mutant_id:
                return record
        return None
