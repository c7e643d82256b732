import json
import random

import pytest

from dehnfill.budget import BudgetConfig
from dehnfill.groupfile import parse_group_file
from dehnfill.iso import (
    ISOMORPHIC, NOT_ISOMORPHIC, UNKNOWN, compare, disprove_step, level_order,
    search_isomorphism, verdict_record, verify_certificate, verify_record, verify_witness,
)
from dehnfill.presentation import MarkedGroup, PeripheralRecord, Presentation
from dehnfill.randomize import random_tietze

from seeds import SEEDS, seed


def bare(gens, *rels):
    return MarkedGroup(Presentation.from_strings(gens, rels))


@pytest.mark.parametrize("name", sorted(SEEDS))
def test_identical_groups_never_certified(name):
    g = seed(name)
    for i in range(1, 4):
        assert disprove_step(g, g, i) is None


def test_torsion_certificate():
    g, h = seed("F2_ab"), seed("F2_ab2")
    cert = disprove_step(g, h, 2)
    assert cert.field == "torsion" and cert.values == ([2, 2], [2, 4])
    assert verify_certificate(g, h, cert)


def test_peripheral_count_certificate():
    cert = disprove_step(seed("figure_eight"), seed("F2_ab"), 1)
    assert cert.field == "peripheral_count" and cert.values == (1, 2)


def test_certificate_stable_under_larger_budget():
    g, h = seed("F2_ab"), seed("F2_ab2")
    small = disprove_step(g, h, 2)
    big = disprove_step(g, h, 2, BudgetConfig(hom_node_budget=10**7, wp_node_budget=10**5))
    assert (small.field, small.values) == (big.field, big.values)


def test_tampered_certificate_fails():
    g, h = seed("F2_ab"), seed("F2_ab2")
    cert = disprove_step(g, h, 2)
    cert.values = ([2, 2], [2, 2])
    assert not verify_certificate(g, h, cert)


def test_level_order():
    assert level_order(4) == [2, 3, 4, 1]
    assert level_order(1) == [1]


def test_identity_witness():
    g = seed("trefoil")
    w = search_isomorphism(g, g)
    assert w is not None and verify_witness(g, g, w)


def test_renaming_witness():
    g, h = bare("a"), bare("b")
    w = search_isomorphism(g, h)
    assert w.forward == ((1,),) and w.backward == ((1,),)


def test_killed_generator_witness():
    g, h = bare("a, b", "b"), bare("c")
    w = search_isomorphism(g, h)
    assert w.forward == ((1,), ()) and w.backward == ((1,),)
    assert verify_witness(g, h, w)
    assert all(len(d) <= 1 for d in w.checks.values())


def test_tampered_witness_fails():
    g, h = bare("a, b", "b"), bare("c")
    w = search_isomorphism(g, h)
    w.forward = ((1, 1), ())
    assert not verify_witness(g, h, w)


def test_compare_examples():
    g = seed("figure_eight")
    assert compare(g, g).status == ISOMORPHIC
    v = compare(seed("F2_ab"), seed("F2_ab2"))
    assert v.status == NOT_ISOMORPHIC and v.certificate.level == 2
    u = compare(g, g, BudgetConfig.zero())
    assert u.status == UNKNOWN and "levels_examined" in u.report


def test_peripheral_order_matters():
    # same ambient group, different peripheral subgroup
    a = seed("F2_ab")
    b = MarkedGroup(a.ambient, (a.peripherals[0], PeripheralRecord("B", ((2, 2, 2),), Presentation(("y",)))))
    assert compare(a, b).status == NOT_ISOMORPHIC


@pytest.mark.parametrize("name", sorted(SEEDS))
def test_random_tietze_pairs(name):
    g = seed(name)
    rng = random.Random(f"iso-{name}")
    for _ in range(3):
        h, _ = random_tietze(g, rng, moves=rng.randint(1, 3))
        v = compare(g, h)
        assert v.status == ISOMORPHIC
        assert verify_witness(g, h, v.witness)


def test_records_round_trip():
    budget = BudgetConfig()
    for g, h in [(seed("trefoil"), random_tietze(seed("trefoil"), random.Random(1), 2)[0]),
                 (seed("F2_ab"), seed("F2_ab2"))]:
        v = compare(g, h, budget)
        rec = json.loads(json.dumps(verdict_record(g, h, v, budget)))
        assert verify_record(rec) == (True, "witness verified" if v.status == ISOMORPHIC else "certificate verified")


def test_tampered_record_fails():
    g = seed("z2_z3")
    h = parse_group_file(SEEDS["z2_z3"].replace("group Mod", "group Other"))
    v = compare(g, h)
    rec = verdict_record(g, h, v, BudgetConfig())
    rec["witness"]["forward"]["a"] = "b"
    ok, _ = verify_record(rec)
    assert not ok
