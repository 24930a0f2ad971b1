"""
The fifteen mutation operators and the patches they produce.

Mutants are enumerated in a canonical order (operator, then site, then the
operator's fixed variant order) and numbered from 1, so identical sources
and operator sets always yield identical ids.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations, permutations
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

from modules import logger
from modules.dataflow_model import (
    JOIN_KINDS,
    SET_KINDS,
    ProgramGraph,
    Transformation,
    TransformationKind,
    signature,
)
from modules.udf_wrappers import (
    AggReplace,
    AggReplacement,
    MapResult,
    NegatePredicate,
    UdfWrapper,
    WrappedUdf,
    applicable_mappings,
)
from modules.value_types import default_value


class MutationOperatorId(str, Enum):
    UTS = "UTS"  # unary transformation swap
    BTS = "BTS"  # binary transformation swap
    UTR = "UTR"  # unary transformation replacement
    BTR = "BTR"  # binary transformation replacement
    UTD = "UTD"  # unary transformation deletion
    MTR = "MTR"  # mapping transformation
    FTD = "FTD"  # filter transformation deletion
    NFTP = "NFTP"  # negation of filter predicate
    STR = "STR"  # set transformation replacement
    DTI = "DTI"  # distinct insertion
    DTD = "DTD"  # distinct deletion
    ATR = "ATR"  # aggregation transformation replacement
    JTR = "JTR"  # join transformation replacement
    OTD = "OTD"  # order transformation deletion
    OTI = "OTI"  # order transformation inversion


ALL_OPERATORS: Tuple[MutationOperatorId, ...] = tuple(MutationOperatorId)
DATA_FLOW_OPERATORS = frozenset({
    MutationOperatorId.UTS, MutationOperatorId.BTS, MutationOperatorId.UTR,
    MutationOperatorId.BTR, MutationOperatorId.UTD,
})


class MutantStatus(str, Enum):
    GENERATED = "Generated"
    REMOVED = "Removed"
    KILLED = "Killed"
    SURVIVED = "Survived"
    EQUIVALENT = "Equivalent"


# ---------------------------------------------------------------------------
# Patches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReplaceSite:
    """Put `transformation` (already carrying the site's id and output) at `site`"""
    site: int
    transformation: Transformation


@dataclass(frozen=True)
class DeleteSite:
    """Remove the site; its consumers and outputs read input `keep_input` instead"""
    site: int
    keep_input: int = 0


@dataclass(frozen=True)
class SwapSites:
    """Exchange the operations of two sites, each keeping its own datasets"""
    site_a: int
    site_b: int


@dataclass(frozen=True)
class InsertAfter:
    site: int
    kind: TransformationKind = TransformationKind.DISTINCT


@dataclass(frozen=True)
class WrapUdf:
    site: int
    udf_index: int
    wrapper: UdfWrapper


@dataclass(frozen=True)
class ReplaceJoinWithAdjustment:
    """Change the join kind; `adjustment` lists the (side, default) fills restoring the output type"""
    site: int
    new_kind: TransformationKind
    adjustment: Tuple[Tuple[str, Any], ...] = ()


GraphPatch = Union[ReplaceSite, DeleteSite, SwapSites, InsertAfter, WrapUdf, ReplaceJoinWithAdjustment]


@dataclass(frozen=True)
class Mutant:
    id: int
    operator: MutationOperatorId
    sites: Tuple[int, ...]
    patch: GraphPatch
    description: str
    variant: str
    site_kinds: Tuple[TransformationKind, ...] = ()
    status: MutantStatus = MutantStatus.GENERATED
    removed_by: Optional[str] = None  # ReductionRuleId value
    killed_by: Tuple[str, ...] = ()

    @property
    def is_removed(self) -> bool:
        return self.removed_by is not None

    @property
    def wrapper(self) -> Optional[UdfWrapper]:
        return self.patch.wrapper if isinstance(self.patch, WrapUdf) else None


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Candidate:
    sites: Tuple[int, ...]
    patch: GraphPatch
    description: str
    variant: str


def _unary_sites(graph: ProgramGraph) -> List[Transformation]:
    return [t for t in graph.transformations if not t.kind.is_binary]


def _binary_sites(graph: ProgramGraph) -> List[Transformation]:
    return [t for t in graph.transformations if t.kind.is_binary]


def _with_operation(target: Transformation, source: Transformation) -> Transformation:
    """Copy source's operation onto target's datasets"""
    return replace(target, kind=source.kind, udfs=source.udfs, ascending=source.ascending)


def _swaps(graph: ProgramGraph, sites: Sequence[Transformation]) -> Iterable[_Candidate]:
    for a, b in combinations(sites, 2):
        if signature(a.id, graph) == signature(b.id, graph):
            yield _Candidate((a.id, b.id), SwapSites(a.id, b.id),
                             f"Swap {a.kind.value} (site {a.id}) with {b.kind.value} (site {b.id})", "swap")


def _replacements(graph: ProgramGraph, sites: Sequence[Transformation]) -> Iterable[_Candidate]:
    for a, b in permutations(sites, 2):
        if signature(a.id, graph) == signature(b.id, graph):
            yield _Candidate((a.id, b.id), ReplaceSite(a.id, _with_operation(a, b)),
                             f"Replace {a.kind.value} (site {a.id}) with a copy of {b.kind.value} (site {b.id})",
                             f"copy-of-{b.id}")


def _gen_uts(graph):
    return _swaps(graph, _unary_sites(graph))


def _gen_bts(graph):
    return _swaps(graph, _binary_sites(graph))


def _gen_utr(graph):
    return _replacements(graph, _unary_sites(graph))


def _gen_btr(graph):
    return _replacements(graph, _binary_sites(graph))


def _gen_utd(graph):
    for t in _unary_sites(graph):
        inputs, output = signature(t.id, graph)
        if inputs[0] == output:
            yield _Candidate((t.id,), DeleteSite(t.id), f"Delete {t.kind.value} (site {t.id})", "delete")


def _gen_mtr(graph):
    for t in graph.transformations:
        if t.kind not in (TransformationKind.MAP, TransformationKind.FLAT_MAP):
            continue
        for mapping in applicable_mappings(t.udfs[0].result_type):
            yield _Candidate((t.id,), WrapUdf(t.id, 0, MapResult(mapping)),
                             f"Map the result of {t.kind.value} (site {t.id}) with {mapping.label}",
                             mapping.label)


def _gen_ftd(graph):
    for t in graph.transformations:
        if t.kind is TransformationKind.FILTER:
            yield _Candidate((t.id,), DeleteSite(t.id), f"Delete filter (site {t.id})", "delete")


def _gen_nftp(graph):
    for t in graph.transformations:
        if t.kind is TransformationKind.FILTER:
            yield _Candidate((t.id,), WrapUdf(t.id, 0, NegatePredicate()),
                             f"Negate the filter predicate (site {t.id})", NegatePredicate.label)


def _gen_str(graph):
    for t in graph.transformations:
        if t.kind not in SET_KINDS:
            continue
        for other in SET_KINDS:
            if other is not t.kind:
                yield _Candidate((t.id,), ReplaceSite(t.id, replace(t, kind=other)),
                                 f"Replace {t.kind.value} (site {t.id}) with {other.value}", other.value)
        left, right = (graph.dataset(i).name for i in t.inputs)
        yield _Candidate((t.id,), DeleteSite(t.id, 0),
                         f"Keep only the left operand {left} of {t.kind.value} (site {t.id})", "keep-left")
        yield _Candidate((t.id,), DeleteSite(t.id, 1),
                         f"Keep only the right operand {right} of {t.kind.value} (site {t.id})", "keep-right")
        if t.kind is TransformationKind.SUBTRACT:
            yield _Candidate((t.id,), ReplaceSite(t.id, replace(t, inputs=t.inputs[::-1])),
                             f"Swap the operands of subtract (site {t.id})", "swap-operands")


def _gen_dti(graph):
    for t in graph.transformations:
        if t.kind is not TransformationKind.DISTINCT:
            yield _Candidate((t.id,), InsertAfter(t.id),
                             f"Insert distinct after {t.kind.value} (site {t.id})", "distinct")


def _gen_dtd(graph):
    for t in graph.transformations:
        if t.kind is TransformationKind.DISTINCT:
            yield _Candidate((t.id,), DeleteSite(t.id), f"Delete distinct (site {t.id})", "delete")


def _gen_atr(graph):
    for t in graph.transformations:
        if t.kind is not TransformationKind.REDUCE_BY_KEY:
            continue
        for variant in AggReplacement:
            wrapped = WrappedUdf(t.udfs[0], AggReplace(variant))
            yield _Candidate((t.id,), WrapUdf(t.id, 0, AggReplace(variant)),
                             f"Replace the reduce function (site {t.id}) with {wrapped.render()}", variant.value)


def join_adjustment(graph: ProgramGraph, t: Transformation,
                    new_kind: TransformationKind) -> Tuple[Tuple[str, Any], ...]:
    left_type, right_type = (graph.dataset(i).elem_type for i in t.inputs)
    fills = []
    if new_kind in (TransformationKind.RIGHT_OUTER_JOIN, TransformationKind.FULL_OUTER_JOIN):
        fills.append(("left", default_value(left_type.value)))
    if new_kind in (TransformationKind.LEFT_OUTER_JOIN, TransformationKind.FULL_OUTER_JOIN):
        fills.append(("right", default_value(right_type.value)))
    return tuple(fills)


def _gen_jtr(graph):
    for t in graph.transformations:
        if t.kind not in JOIN_KINDS:
            continue
        for other in JOIN_KINDS:
            if other is not t.kind:
                patch = ReplaceJoinWithAdjustment(t.id, other, join_adjustment(graph, t, other))
                yield _Candidate((t.id,), patch, f"Replace {t.kind.value} (site {t.id}) with {other.value}",
                                 other.value)


def _gen_otd(graph):
    for t in graph.transformations:
        if t.kind.is_sort:
            yield _Candidate((t.id,), DeleteSite(t.id), f"Delete {t.kind.value} (site {t.id})", "delete")


def _gen_oti(graph):
    for t in graph.transformations:
        if t.kind.is_sort:
            flipped = "desc" if t.ascending else "asc"
            yield _Candidate((t.id,), ReplaceSite(t.id, replace(t, ascending=not t.ascending)),
                             f"Invert the ordering of {t.kind.value} (site {t.id}) to {flipped}", flipped)


_GENERATORS = {
    MutationOperatorId.UTS: _gen_uts,
    MutationOperatorId.BTS: _gen_bts,
    MutationOperatorId.UTR: _gen_utr,
    MutationOperatorId.BTR: _gen_btr,
    MutationOperatorId.UTD: _gen_utd,
    MutationOperatorId.MTR: _gen_mtr,
    MutationOperatorId.FTD: _gen_ftd,
    MutationOperatorId.NFTP: _gen_nftp,
    MutationOperatorId.STR: _gen_str,
    MutationOperatorId.DTI: _gen_dti,
    MutationOperatorId.DTD: _gen_dtd,
    MutationOperatorId.ATR: _gen_atr,
    MutationOperatorId.JTR: _gen_jtr,
    MutationOperatorId.OTD: _gen_otd,
    MutationOperatorId.OTI: _gen_oti,
}


def generate_mutants(graph: ProgramGraph, operators: Iterable[MutationOperatorId] = ALL_OPERATORS) -> List[Mutant]:
    """All mutants of the enabled operators, numbered 1..N in canonical order"""
    enabled = set(operators)
    mutants: List[Mutant] = []
    for operator in ALL_OPERATORS:
        if operator not in enabled:
            continue
        for candidate in _GENERATORS[operator](graph):
            mutants.append(Mutant(
                id=len(mutants) + 1,
                operator=operator,
                sites=candidate.sites,
                patch=candidate.patch,
                description=candidate.description,
                variant=candidate.variant,
                site_kinds=tuple(graph.site(s).kind for s in candidate.sites),
            ))
    logger.info(f"Generated {len(mutants)} mutants for program '{graph.name}'")
    return mutants


def count_by_operator(mutants: Iterable[Mutant]) -> dict:
    counts = {op: 0 for op in ALL_OPERATORS}
    for mutant in mutants:
        counts[mutant.operator] += 1
    return counts
