import pytest

from cartierv.suites import REPROS, SUITES, run_repro, run_suites


def test_all_suites_small_counts():
    counts = {"prop32": 6, "lemma31": 6, "roots": 10, "prop38": 4,
              "skoda": 2, "lemma72": 10}
    for name, cases in counts.items():
        (result,) = run_suites([name], seed=0, cases=cases)
        assert result.ok, result.failures
        assert result.cases == cases


def test_suites_deterministic():
    first = run_suites(["prop32", "roots"], seed=3, cases=5)
    second = run_suites(["prop32", "roots"], seed=3, cases=5)
    assert [(r.name, r.cases, r.failures) for r in first] == \
           [(r.name, r.cases, r.failures) for r in second]


def test_run_suites_default_order():
    results = run_suites(cases=2)
    assert [r.name for r in results] == list(SUITES)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suites(["nosuch"])
    with pytest.raises(ValueError):
        run_repro("nosuch")


@pytest.mark.parametrize("name", sorted(REPROS))
def test_repro_scenarios(name):
    result = run_repro(name)
    assert result.scenario == name
    assert result.ok, [(c.name, c.detail) for c in result.checks if not c.ok]
    assert all(check.name for check in result.checks)
