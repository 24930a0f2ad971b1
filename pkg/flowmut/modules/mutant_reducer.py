"""
Selective mutation: marks redundant or trivially killed mutants as removed.

Removed mutants stay in the list (and in the meta-mutant) so they can still
be forced to run later.
"""
from __future__ import annotations

from dataclasses import replace
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Set

from modules import logger
from modules.dataflow_model import TransformationKind
from modules.mutation_operators import Mutant, MutantStatus, MutationOperatorId as Op
from modules.udf_wrappers import AggReplacement, MapResult, MappingValueId


class ReductionRuleId(str, Enum):
    UTDE = "UTDE"
    FTDS = "FTDS"
    OTDS = "OTDS"
    MTRR = "MTRR"
    DTIE = "DTIE"
    ATRC = "ATRC"


ALL_RULES = tuple(ReductionRuleId)

_TRIVIAL_MAPPINGS = frozenset({
    MappingValueId.NUM_MAX,
    MappingValueId.NUM_MIN,
    MappingValueId.STR_EMPTY,
    MappingValueId.LIST_REVERSE,
    MappingValueId.NULL_VALUE,
})


def _utde(mutant: Mutant, ops: Set[Op]) -> bool:
    return Op.UTD in ops and mutant.operator in (Op.FTD, Op.DTD, Op.OTD)


def _ftds(mutant: Mutant, ops: Set[Op]) -> bool:
    return mutant.operator is Op.NFTP and (Op.FTD in ops or Op.UTD in ops)


def _otds(mutant: Mutant, ops: Set[Op]) -> bool:
    return mutant.operator is Op.OTI and (Op.OTD in ops or Op.UTD in ops)


def _mtrr(mutant: Mutant, ops: Set[Op]) -> bool:
    if mutant.operator is not Op.MTR or not isinstance(mutant.wrapper, MapResult):
        return False
    return any(i in _TRIVIAL_MAPPINGS for i in mutant.wrapper.mapping.leaf_ids())


def _dtie(mutant: Mutant, ops: Set[Op]) -> bool:
    return mutant.operator is Op.DTI and mutant.site_kinds[0] in (
        TransformationKind.GROUP_BY_KEY, TransformationKind.REDUCE_BY_KEY)


def _atrc(mutant: Mutant, ops: Set[Op]) -> bool:
    return mutant.operator is Op.ATR and mutant.variant == AggReplacement.SWAPPED.value


_RULES: Dict[ReductionRuleId, Callable[[Mutant, Set[Op]], bool]] = {
    ReductionRuleId.UTDE: _utde,
    ReductionRuleId.FTDS: _ftds,
    ReductionRuleId.OTDS: _otds,
    ReductionRuleId.MTRR: _mtrr,
    ReductionRuleId.DTIE: _dtie,
    ReductionRuleId.ATRC: _atrc,
}


def matching_rule(mutant: Mutant, rules: Iterable[ReductionRuleId], operators: Iterable[Op]) -> Optional[ReductionRuleId]:
    """First enabled rule (in rule order) that removes the mutant"""
    enabled = set(rules)
    ops = set(operators)
    for rule in ALL_RULES:
        if rule in enabled and _RULES[rule](mutant, ops):
            return rule
    return None


def reduce_mutants(mutants: Iterable[Mutant], rules: Iterable[ReductionRuleId] = ALL_RULES,
                   operators: Iterable[Op] = tuple(Op)) -> List[Mutant]:
    """Return the mutants with Removed status set where an enabled rule applies"""
    enabled = list(rules)
    ops = list(operators)
    result = []
    removed = 0
    for mutant in mutants:
        rule = matching_rule(mutant, enabled, ops)
        if rule is not None:
            mutant = replace(mutant, status=MutantStatus.REMOVED, removed_by=rule.value)
            removed += 1
        result.append(mutant)
    logger.info(f"Reduction removed {removed} of {len(result)} mutants")
    return result
