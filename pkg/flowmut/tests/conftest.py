"""Pytest configuration and fixtures for flowmut tests"""
import json
import os
import shutil
import sys
import tempfile
from pathlib import Path

import pytest

# Keep test runs from writing log files into the working tree
os.environ.setdefault("FLOWMUT_LOG_DIR", tempfile.mkdtemp(prefix="flowmut-logs-"))

# Add parent directory to path to import flowmut modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.dsl_parser import parse_program
from modules.mutant_reducer import reduce_mutants
from modules.mutation_operators import generate_mutants
from modules.test_harness import load_test_suite

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def word_count_source():
    return (FIXTURES_DIR / "word_count.dflow").read_text(encoding="utf-8")


@pytest.fixture
def word_count(word_count_source):
    """Parsed word count program (flatMap, map, reduceByKey)"""
    return parse_program(word_count_source, "word_count.dflow")


@pytest.fixture
def log_analysis():
    """Parsed log analysis program (filter, map, filter over strings)"""
    path = FIXTURES_DIR / "log_analysis.dflow"
    return parse_program(path.read_text(encoding="utf-8"), str(path))


@pytest.fixture
def word_count_mutants(word_count):
    """The 20 word count mutants with every reduction rule applied"""
    return reduce_mutants(generate_mutants(word_count))


@pytest.fixture
def word_count_suite(word_count):
    return load_test_suite(FIXTURES_DIR / "word_count_tests.json", word_count)


@pytest.fixture
def word_count_enumeration():
    """Hand-enumerated word count mutants"""
    return json.loads((FIXTURES_DIR / "word_count_mutants.json").read_text(encoding="utf-8"))


@pytest.fixture
def project_dir(tmp_path):
    """A copy of the word count project (sources, suite, flowmut.json) in a temp dir"""
    for name in ("word_count.dflow", "log_analysis.dflow", "word_count_tests.json", "flowmut.json"):
        shutil.copy(FIXTURES_DIR / name, tmp_path / name)
    return tmp_path


@pytest.fixture
def write_json():
    """Helper writing a JSON document and returning its path"""
    def _write(path: Path, data) -> Path:
        path.write_text(json.dumps(data, indent=2), encoding="utf-8")
        return path
    return _write
