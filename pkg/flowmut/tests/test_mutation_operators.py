"""Tests for mutant generation by the fifteen mutation operators"""
import pytest

from modules.dataflow_model import TransformationKind
from modules.dsl_parser import parse_program
from modules.mutation_operators import (
    ALL_OPERATORS,
    DeleteSite,
    InsertAfter,
    MutantStatus,
    MutationOperatorId as Op,
    ReplaceJoinWithAdjustment,
    SwapSites,
    WrapUdf,
    count_by_operator,
    generate_mutants,
)

SET_PROGRAM = """program sets
input a: list<int>
input b: list<int>
c = a.union(b)
d = c.subtract(b)
output d
"""

JOIN_PROGRAM = """program joins
input l: list<(string, int)>
input r: list<(string, float)>
j = l.join(r)
output j
"""

SORT_PROGRAM = """program ranking
input a: list<(string, int)>
u = a.distinct()
s = u.sortBy(p -> p.value, desc)
output s
"""


def counts(mutants):
    return {op: n for op, n in count_by_operator(mutants).items() if n}


def variants(mutants, operator):
    return [m.variant for m in mutants if m.operator is operator]


@pytest.mark.unit
@pytest.mark.mutation
class TestWordCountMutants:
    """Tests against the hand-enumerated word count mutants"""

    def test_counts_per_operator(self, word_count):
        mutants = generate_mutants(word_count)
        assert counts(mutants) == {Op.UTD: 2, Op.MTR: 10, Op.DTI: 3, Op.ATR: 5}
        assert len(mutants) == 20

    def test_matches_hand_enumeration(self, word_count, word_count_enumeration):
        mutants = generate_mutants(word_count)
        actual = [{"id": m.id, "operator": m.operator.value, "sites": list(m.sites), "variant": m.variant}
                  for m in mutants]
        expected = [{k: v for k, v in entry.items() if k != "removed_by"} for entry in word_count_enumeration]
        assert actual == expected

    def test_flat_map_list_mappings(self, word_count):
        mutants = generate_mutants(word_count)
        flat_map = [m.variant for m in mutants if m.operator is Op.MTR and m.sites == (0,)]
        assert flat_map == ["ListHead", "ListTail", "ListReverse", "ListNil"]

    def test_generation_is_deterministic(self, word_count):
        assert generate_mutants(word_count) == generate_mutants(word_count)

    def test_ids_are_consecutive(self, word_count):
        assert [m.id for m in generate_mutants(word_count)] == list(range(1, 21))

    def test_new_mutants_are_generated(self, word_count):
        assert all(m.status is MutantStatus.GENERATED and not m.is_removed
                   for m in generate_mutants(word_count))

    def test_operator_subset_renumbers(self, word_count):
        mutants = generate_mutants(word_count, [Op.ATR])
        assert [m.id for m in mutants] == [1, 2, 3, 4, 5]
        assert [m.variant for m in mutants] == ["FirstArg", "SecondArg", "DupFirst", "DupSecond", "Swapped"]

    def test_patch_kinds(self, word_count):
        by_id = {m.id: m for m in generate_mutants(word_count)}
        assert by_id[1].patch == DeleteSite(0)
        assert isinstance(by_id[3].patch, WrapUdf)
        assert by_id[13].patch == InsertAfter(0, TransformationKind.DISTINCT)
        assert by_id[16].site_kinds == (TransformationKind.REDUCE_BY_KEY,)


@pytest.mark.unit
@pytest.mark.mutation
class TestDataFlowOperators:
    """Tests for the structural operators"""

    def test_log_analysis_counts(self, log_analysis):
        mutants = generate_mutants(log_analysis)
        assert counts(mutants) == {Op.UTS: 3, Op.UTR: 6, Op.UTD: 3, Op.MTR: 1, Op.FTD: 2, Op.NFTP: 2, Op.DTI: 3}
        assert len(mutants) == 20

    def test_swaps_pair_sites_once(self, log_analysis):
        swaps = [m.patch for m in generate_mutants(log_analysis, [Op.UTS])]
        assert swaps == [SwapSites(0, 1), SwapSites(0, 2), SwapSites(1, 2)]

    def test_replacements_are_ordered_pairs(self, log_analysis):
        mutants = generate_mutants(log_analysis, [Op.UTR])
        assert [m.sites for m in mutants] == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]

    def test_swaps_need_equal_signatures(self, word_count):
        assert generate_mutants(word_count, [Op.UTS, Op.UTR]) == []

    def test_binary_swaps_and_replacements(self):
        graph = parse_program(SET_PROGRAM)
        mutants = generate_mutants(graph, [Op.BTS, Op.BTR])
        assert counts(mutants) == {Op.BTS: 1, Op.BTR: 2}


@pytest.mark.unit
@pytest.mark.mutation
class TestTransformationOperators:
    """Tests for the operators that mutate a single transformation"""

    def test_set_replacements(self):
        mutants = generate_mutants(parse_program(SET_PROGRAM), [Op.STR])
        assert [(m.sites, m.variant) for m in mutants] == [
            ((0,), "intersection"), ((0,), "subtract"), ((0,), "keep-left"), ((0,), "keep-right"),
            ((1,), "union"), ((1,), "intersection"), ((1,), "keep-left"), ((1,), "keep-right"),
            ((1,), "swap-operands"),
        ]

    def test_keep_right_deletes_towards_the_second_input(self):
        mutants = generate_mutants(parse_program(SET_PROGRAM), [Op.STR])
        keep_right = next(m for m in mutants if m.sites == (0,) and m.variant == "keep-right")
        assert keep_right.patch == DeleteSite(0, 1)

    def test_join_replacements(self):
        graph = parse_program(JOIN_PROGRAM)
        mutants = generate_mutants(graph, [Op.JTR])
        assert [m.variant for m in mutants] == ["leftOuterJoin", "rightOuterJoin", "fullOuterJoin"]
        full = mutants[2].patch
        assert isinstance(full, ReplaceJoinWithAdjustment)
        assert full.adjustment == (("left", 0), ("right", 0.0))

    def test_order_operators(self):
        graph = parse_program(SORT_PROGRAM)
        mutants = generate_mutants(graph, [Op.OTD, Op.OTI, Op.DTD])
        assert [(m.operator, m.sites, m.variant) for m in mutants] == [
            (Op.DTD, (0,), "delete"), (Op.OTD, (1,), "delete"), (Op.OTI, (1,), "asc"),
        ]

    def test_distinct_is_not_inserted_after_distinct(self):
        graph = parse_program(SORT_PROGRAM)
        assert [m.sites for m in generate_mutants(graph, [Op.DTI])] == [(1,)]

    def test_filter_operators(self, log_analysis):
        mutants = generate_mutants(log_analysis, [Op.FTD, Op.NFTP])
        assert [(m.operator, m.sites) for m in mutants] == [
            (Op.FTD, (0,)), (Op.FTD, (2,)), (Op.NFTP, (0,)), (Op.NFTP, (2,)),
        ]

    def test_mapping_of_a_string_result(self, log_analysis):
        assert variants(generate_mutants(log_analysis), Op.MTR) == ["StrEmpty"]

    def test_every_operator_has_a_generator(self, word_count):
        for operator in ALL_OPERATORS:
            generate_mutants(word_count, [operator])
