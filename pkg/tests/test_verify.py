"""The verify suites at reduced scale (the acceptance module runs them at
full scale)."""

from vasskit import verify


def assert_suite_passes(result):
    failed = [c for c in result.checks if not c.passed]
    assert not failed, f"{result.suite}: {[(c.name, c.detail) for c in failed]}"


def test_arith_suite():
    assert_suite_passes(verify.suite_arith(max_pair=60, max_n=40, trials=60))


def test_weak_mult_suite_small():
    assert_suite_passes(verify.suite_weak_mult(pairs=((2, 1), (3, 2)), max_sum=12))


def test_weak_suite():
    assert_suite_passes(verify.suite_weak(max_b=8))


def test_exp_suite_small():
    assert_suite_passes(verify.suite_exp(max_n=2, trend_ns=(1, 2)))


def test_fractions_suite():
    assert_suite_passes(verify.suite_fractions(max_k=8))


def test_hp_suite_small():
    assert_suite_passes(verify.suite_hp(max_sum=8, max_z=2))


def test_double_exp_suite_small():
    assert_suite_passes(verify.suite_double_exp(flow_max_k=2, probe_max_k=1, pump_sweep=17))


def test_sizes_suite():
    assert_suite_passes(verify.suite_sizes(max_n=6, max_k=6))


def test_semantics_suite():
    assert_suite_passes(verify.suite_semantics(bound=12))


def test_run_suites_rejects_unknown():
    import pytest

    with pytest.raises(ValueError):
        verify.run_suites(["nope"])


def test_suite_result_json_shape():
    result = verify.suite_weak(max_b=3)
    obj = result.to_json_obj()
    assert obj["suite"] == "weak"
    assert obj["passed"] is True
    assert obj["checks"] and {"name", "passed", "detail"} <= set(obj["checks"][0])
