import json
from importlib import resources

import jsonschema
import pytest

from cmcomm import props
from cmcomm.congruences import Partition, join
from cmcomm.dayterms import DayChain
from cmcomm.props import (
    CHECKS,
    MODULAR_ONLY,
    Harness,
    TheoremReport,
    check_additivity,
    check_basic_properties,
    check_homomorphism_property,
    check_symmetry,
    check_two_term_equivalence,
    default_kmax,
    run_checks,
)

THETA = Partition.parse("|0 2|1 3|")
ONE4 = Partition.full(4)
EQ4 = Partition.equality(4)


def _schema():
    return json.loads(resources.files("cmcomm").joinpath("schemas/report.schema.json").read_text())


def test_report_structure():
    rep = TheoremReport("basic", "z4")
    assert rep.passed and rep.status() == "pass"
    rep.fail((ONE4, THETA), "boom")
    assert not rep.passed and rep.status() == "FAIL"
    d = json.loads(rep.to_json())
    assert d["failures"] == [{"T": ["|0 1 2 3|", "|0 2|1 3|"], "details": "boom"}]
    jsonschema.validate([d], _schema())
    assert "FAIL" in rep.summary() and "failures=1" in rep.summary()
    rep = TheoremReport("symmetry", "x", applicable=False, note="why")
    assert not rep.passed and rep.status() == "n/a"


def test_default_caps():
    assert default_kmax(3) == 3 and default_kmax(5) == 3 and default_kmax(6) == 2


def test_harness_shares_cache(algebras):
    h = Harness(algebras["z4ring"], kmax=2)
    check_basic_properties(algebras["z4ring"], harness=h)
    cached = len(h.engine._matrices)
    rep = check_basic_properties(algebras["z4ring"], kmax=1, harness=h)
    assert h.kmax == 2  # a kmax override does not leak into the shared harness
    assert rep.passed
    assert len(h.engine._matrices) == cached


def test_harness_rejects_bad_chain(algebras):
    with pytest.raises(ValueError):
        Harness(algebras["z4"], chain=DayChain.from_list(["x", "y", "u"]))


def test_semilattice_control(algebras):
    reps = {r.theorem: r for r in run_checks(algebras["semilattice2"])}
    assert set(reps) == set(props.THEOREMS)
    for name, rep in reps.items():
        if name in MODULAR_ONLY:
            assert rep.status() == "n/a" and not rep.passed
            assert "not congruence modular" in rep.note
        else:
            assert rep.passed and rep.instances > 0
    jsonschema.validate([r.to_dict() for r in reps.values()], _schema())


def test_z4_ring_symmetric_example(z4ring):
    h = Harness(z4ring, kmax=2)
    assert h.comm((ONE4, THETA)) == h.comm((THETA, ONE4)) == THETA
    assert check_symmetry(z4ring, harness=h).passed


def test_s3_ternary_symmetry(algebras):
    rep = check_symmetry(algebras["s3"], kmax=3)
    assert rep.passed
    assert rep.instances == 9 * 2 + 27 * 6


def test_klein_additivity_example(algebras):
    alg = algebras["z2xz2"]
    h = Harness(alg)
    one = Partition.full(4)
    atoms = [p for p in h.cons if p.num_blocks() == 2]
    assert len(atoms) == 3
    a, b = atoms[:2]
    assert join(a, b) == one
    lhs = h.comm((one, join(a, b)))
    rhs = join(h.comm((one, a)), h.comm((one, b)))
    assert lhs == rhs == Partition.equality(4)
    assert check_additivity(alg, harness=h).passed


def test_z4_ring_additivity_example(z4ring):
    h = Harness(z4ring)
    assert h.comm((ONE4, join(THETA, THETA))) == join(h.comm((ONE4, THETA)), h.comm((ONE4, THETA))) == THETA


def test_z4_homomorphism_example(algebras):
    alg = algebras["z4"]
    h = Harness(alg, kmax=2)
    assert join(h.comm((ONE4, ONE4)), THETA) == THETA
    qeng, f = h.quotient_engine(THETA)
    assert qeng.alg.size == 2
    assert qeng.commutator((Partition.full(2),) * 2) == Partition.equality(2)
    assert props._preimage(Partition.equality(2), f) == THETA
    reps = check_homomorphism_property(alg, harness=h)
    assert [r.theorem for r in reps] == ["homomorphism", "homomorphism-image", "homomorphism-reduction"]
    assert all(r.passed and r.instances > 0 for r in reps)


def test_z4_ring_nested_inequality(z4ring):
    h = Harness(z4ring)
    assert h.comm((THETA, ONE4, ONE4)) <= h.comm((ONE4, ONE4))
    assert h.comm((THETA, ONE4, ONE4)) == THETA


def test_delta_in_T_gives_delta(algebras):
    h = Harness(algebras["s3"])
    eq = Partition.equality(6)
    for T in h.sequences():
        if eq in T:
            assert h.comm(T) == eq


def test_two_term_s3(algebras):
    rep = check_two_term_equivalence(algebras["s3"])
    assert rep.passed and rep.instances > 0


@pytest.mark.parametrize("name", ["z4ring", "z2xz2"])
def test_all_checks_pass(name, algebras):
    reps = run_checks(algebras[name])
    assert all(r.passed for r in reps), [r.summary() for r in reps if not r.passed]
    assert all(r.instances > 0 for r in reps)


def test_named_subset(algebras):
    reps = run_checks(algebras["z3"], names=["basic", "homomorphism"], kmax=2)
    assert [r.theorem for r in reps] == ["basic", "homomorphism", "homomorphism-image", "homomorphism-reduction"]


def test_failures_are_reported(algebras, monkeypatch):
    # a wrong commutator must surface as failures, never a silent pass
    alg = algebras["z4ring"]
    h = Harness(alg, kmax=2)
    monkeypatch.setattr(h, "comm", lambda T, pivot=None: Partition.full(4) if len(T) == 2 else Partition.equality(4))
    reps = [CHECKS["basic"](alg, harness=h), CHECKS["symmetry"](alg, harness=h)]
    assert not reps[0].passed
    assert any("not below" in f.details for f in reps[0].failures)
    jsonschema.validate([r.to_dict() for r in reps], _schema())


def test_asymmetric_commutator_is_caught(algebras, monkeypatch):
    alg = algebras["z4ring"]
    h = Harness(alg, kmax=2)
    real = h.comm

    def lopsided(T, pivot=None):
        if tuple(T) == (ONE4, THETA):
            return EQ4
        return real(T, pivot)

    monkeypatch.setattr(h, "comm", lopsided)
    rep = check_symmetry(alg, harness=h)
    assert rep.status() == "FAIL"
    assert rep.failures[0].T in {("|0 1 2 3|", "|0 2|1 3|"), ("|0 2|1 3|", "|0 1 2 3|")}


def test_every_check_is_registered():
    assert set(CHECKS) | {"homomorphism-image", "homomorphism-reduction"} == set(props.THEOREMS)
