"""Tests for values, the program graph and its validation rules"""
import pytest

from modules.dataflow_model import (
    Dataset,
    ProgramGraph,
    ProgramOutput,
    Transformation,
    TransformationKind,
    execution_order,
    infer_output_type,
    signature,
    validate,
)
from modules.dsl_parser import parse_program
from modules.errors import SiteLookupError
from modules.value_types import (
    FLOAT,
    INT,
    NULL,
    STR,
    ListValue,
    conforms,
    default_value,
    format_value,
    from_json_value,
    list_of,
    pair_of,
    to_json_value,
    values_equal,
)


@pytest.mark.unit
@pytest.mark.model
class TestValueTypes:
    """Tests for runtime values and their types"""

    def test_int_and_float_are_distinct(self):
        """Ints never conform to float and never compare equal to floats"""
        assert conforms(1, INT)
        assert not conforms(1, FLOAT)
        assert not conforms(1.0, INT)
        assert not values_equal(1, 1.0)

    def test_bool_is_not_an_int(self):
        assert not conforms(True, INT)

    def test_int_range_is_64_bit(self):
        assert conforms(2 ** 63 - 1, INT)
        assert not conforms(2 ** 63, INT)

    def test_null_conforms_to_anything(self):
        assert conforms(NULL, INT)
        assert conforms(NULL, pair_of(STR, INT))

    def test_pair_and_list_are_distinct(self):
        assert conforms(("a", 1), pair_of(STR, INT))
        assert not conforms(ListValue(("a", "b")), pair_of(STR, STR))
        assert conforms(ListValue(("a", "b")), list_of(STR))

    def test_float_tolerance(self):
        assert values_equal(0.1 + 0.2, 0.3, 1e-9)
        assert not values_equal(0.1 + 0.2, 0.3, 0.0)

    def test_nan_never_equal(self):
        assert not values_equal(float("nan"), float("nan"), 1.0)

    def test_default_values(self):
        """Outer-join fills for each type"""
        assert default_value(INT) == 0
        assert default_value(FLOAT) == 0.0
        assert default_value(STR) == ""
        assert default_value(pair_of(STR, INT)) == ("", 0)
        assert default_value(list_of(INT)) == ListValue()

    def test_format_value(self):
        assert format_value(("a", 1)) == '("a", 1)'
        assert format_value(ListValue((1, 2))) == "[1, 2]"
        assert format_value(NULL) == "null"
        assert format_value("tab\there") == '"tab\\there"'

    def test_json_decoding(self):
        """Pairs are 2-arrays, lists are arrays"""
        value = from_json_value(["a", [1, 2]], pair_of(STR, list_of(INT)))
        assert value == ("a", ListValue((1, 2)))
        assert isinstance(value[1], ListValue)
        assert to_json_value(value) == ["a", [1, 2]]

    def test_json_decoding_rejects_int_for_float(self):
        with pytest.raises(ValueError, match="decimal point"):
            from_json_value(1, FLOAT)

    def test_json_decoding_rejects_null(self):
        with pytest.raises(ValueError, match="null"):
            from_json_value(None, INT)


@pytest.mark.unit
@pytest.mark.model
class TestProgramGraph:
    """Tests for lookups, signatures and execution order"""

    def test_sites_are_numbered_in_program_order(self, word_count):
        kinds = [t.kind for t in word_count.transformations]
        assert kinds == [TransformationKind.FLAT_MAP, TransformationKind.MAP, TransformationKind.REDUCE_BY_KEY]
        assert [t.id for t in word_count.transformations] == [0, 1, 2]

    def test_site_lookup(self, word_count):
        assert word_count.site(2).kind is TransformationKind.REDUCE_BY_KEY
        with pytest.raises(SiteLookupError):
            word_count.site(99)

    def test_signature(self, word_count):
        assert signature(0, word_count) == ((STR,), STR)
        assert signature(1, word_count) == ((STR,), pair_of(STR, INT))
        assert signature(2, word_count) == ((pair_of(STR, INT),), pair_of(STR, INT))

    def test_output_lookup(self, word_count):
        assert word_count.output_names == ["counts"]
        assert word_count.output_dataset("counts").elem_type == pair_of(STR, INT)

    def test_producer_and_consumers(self, word_count):
        words = word_count.dataset_by_name("words")
        assert word_count.producer(words.id).id == 0
        assert [t.id for t in word_count.consumers(words.id)] == [1]

    def test_execution_order_follows_dependencies(self, word_count):
        assert [t.id for t in execution_order(word_count)] == [0, 1, 2]


@pytest.mark.unit
@pytest.mark.model
class TestValidation:
    """Tests for the structural and type rules"""

    def test_parsed_program_is_valid(self, word_count):
        assert validate(word_count).ok

    def test_reduce_by_key_needs_pairs(self):
        output_type, problems = infer_output_type(TransformationKind.REDUCE_BY_KEY, [STR], (), 3)
        assert output_type is None
        assert problems[0].message == "ReduceByKey takes 1 function(s) at site 3"

    def test_union_needs_equal_types(self):
        _, problems = infer_output_type(TransformationKind.UNION, [STR, INT], (), 0)
        assert problems and problems[0].rule == "set-types"

    def test_join_output_type(self):
        output_type, problems = infer_output_type(
            TransformationKind.LEFT_OUTER_JOIN, [pair_of(STR, INT), pair_of(STR, FLOAT)], (), 0)
        assert not problems
        assert output_type == pair_of(STR, pair_of(INT, FLOAT))

    def test_wrong_declared_output_type(self, word_count):
        datasets = tuple(Dataset(ds.id, ds.name, INT) if ds.name == "counts" else ds
                         for ds in word_count.datasets)
        broken = ProgramGraph(word_count.name, word_count.inputs, datasets,
                              word_count.transformations, word_count.outputs)
        result = validate(broken)
        assert not result.ok
        assert any(d.rule == "output-type" for d in result.diagnostics)

    def test_missing_output(self, word_count):
        broken = ProgramGraph(word_count.name, word_count.inputs, word_count.datasets,
                              word_count.transformations, ())
        assert any(d.rule == "outputs" for d in validate(broken).diagnostics)

    def test_dataset_produced_twice(self):
        graph = parse_program("program p input a: list<int> b = a.distinct() output b")
        extra = Transformation(1, TransformationKind.DISTINCT, (0,), graph.transformations[0].output)
        broken = ProgramGraph(graph.name, graph.inputs, graph.datasets,
                              graph.transformations + (extra,), graph.outputs)
        assert any(d.rule == "single-producer" for d in validate(broken).diagnostics)

    def test_cycle_is_rejected(self):
        datasets = (Dataset(0, "a", INT), Dataset(1, "b", INT), Dataset(2, "c", INT))
        transformations = (
            Transformation(0, TransformationKind.UNION, (0, 2), 1),
            Transformation(1, TransformationKind.DISTINCT, (1,), 2),
        )
        graph = ProgramGraph("cyclic", (0,), datasets, transformations, (ProgramOutput("b", 1),))
        assert any(d.rule == "acyclic" for d in validate(graph).diagnostics)

    def test_ordering_only_on_sorts(self):
        graph = parse_program("program p input a: list<int> b = a.distinct() output b")
        t = graph.transformations[0]
        flipped = Transformation(t.id, t.kind, t.inputs, t.output, ascending=False)
        broken = ProgramGraph(graph.name, graph.inputs, graph.datasets, (flipped,), graph.outputs)
        assert any(d.rule == "ordering" for d in validate(broken).diagnostics)
