"""Exit criteria, each at its stated tolerance; one PASS/FAIL line per criterion."""
import pytest
from click.testing import CliRunner

from heisengeo import acceptance
from heisengeo.cli import main

from .conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


def _record(result):
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    return result


@pytest.mark.parametrize("criterion", range(1, 12))
def test_criterion(criterion):
    result = _record(acceptance.run_check(criterion, seed=0))
    assert result.passed, result.to_dict()


def test_criterion_12_reproduce_is_byte_identical():
    runner = CliRunner()
    args = ["reproduce", "--seed", "0", "--quiet"]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    same = first.stdout == second.stdout and first.exit_code == second.exit_code
    subcommands = acceptance.run_check(12, seed=0)
    measure = acceptance.Measure("byte-identical reproduce reports", bool(same), None)
    result = acceptance.CheckResult(12, "CLI determinism", same and subcommands.passed, False, [measure] + subcommands.measures)
    _record(result)
    assert result.passed


def test_tolerance_override_is_flagged():
    result = acceptance.run_check(2, seed=0, tolerances={"triangle": 1e-15}, samples={"triangle": 2000})
    assert not result.passed and result.tolerance_induced


def test_verdicts_are_seed_stable():
    small = {"group": 500, "triangle": 2000, "dominance": 2000, "isometry": 1000, "homs": 10, "busemann": 10}
    for criterion in (1, 2, 4, 6, 8, 9, 11):
        a = acceptance.run_check(criterion, seed=0, samples=small)
        b = acceptance.run_check(criterion, seed=7, samples=small)
        assert a.passed == b.passed
