import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from fixplan.model import (AtomicSpec, FlatSystem, HierNode, JointTable,
                           LimitExceededError, ModelError, ModelWarning,
                           derived_failure_probability, independent_joint,
                           load_model, model_from_dict, model_to_dict,
                           ok_marginal, save_model, validate_model)
from conftest import random_flat


def test_minimal_model_valid():
    model = FlatSystem(components=(AtomicSpec("A", 0.5, 10.0),))
    assert validate_model(model) is model


def test_incomplete_inspection_spec_rejected():
    model = FlatSystem(components=(AtomicSpec("A", 0.5, 10.0, d=1.0),))
    with pytest.raises(ModelError, match="inspection spec incomplete"):
        validate_model(model)


def test_unnormalized_joint_rejected():
    joint = JointTable(components=("A",), entries=(
        (frozenset(), 0.5), (frozenset({"A"}), 0.4)))
    model = FlatSystem(components=(AtomicSpec("A", 0.5, 1.0),), joint=joint)
    with pytest.raises(ModelError, match="not normalized"):
        validate_model(model)


def test_duplicate_ids_rejected():
    model = FlatSystem(components=(AtomicSpec("A", 0.5, 1.0),
                                   AtomicSpec("A", 0.2, 2.0)))
    with pytest.raises(ModelError, match="duplicate"):
        validate_model(model)


def test_negative_cost_and_bad_probability_both_reported():
    model = FlatSystem(components=(AtomicSpec("A", 1.5, -2.0),))
    with pytest.raises(ModelError) as exc:
        validate_model(model)
    assert len(exc.value.errors) == 2


def test_expensive_inspection_warns_but_validates():
    model = FlatSystem(components=(AtomicSpec("A", 0.5, 1.0, d=5.0, h=0.5),))
    with pytest.warns(ModelWarning, match="inspection cost"):
        validate_model(model)


def test_malformed_tree_rejected():
    bad = HierNode("R", c=1.0, children=(HierNode("L", c=1.0),))
    with pytest.raises(ModelError, match="leaf without failure probability"):
        validate_model(bad)


def test_ok_marginal_fix4(fix4):
    joint, _ = fix4
    assert ok_marginal(joint, {"A"}) == pytest.approx(0.6, abs=1e-12)
    assert ok_marginal(joint, set()) == pytest.approx(1.0, abs=1e-12)
    assert ok_marginal(joint, {"A", "B"}) == pytest.approx(0.4, abs=1e-12)


def test_ok_marginal_unknown_id(fix4):
    joint, _ = fix4
    with pytest.raises(KeyError):
        ok_marginal(joint, {"Z"})


def test_derived_failure_probability_leaf():
    assert derived_failure_probability(HierNode("L", c=1.0, leaf_p=0.3)) == 0.3


def test_derived_failure_probability_internal():
    node = HierNode("R", c=1.0, children=(
        HierNode("a", c=1.0, leaf_p=0.5), HierNode("b", c=1.0, leaf_p=0.2)))
    # enumerate the 4 leaf worlds: broken unless both ok (0.5 * 0.8)
    assert derived_failure_probability(node) == pytest.approx(0.6, abs=1e-12)


def test_derived_failure_probability_never_fails():
    node = HierNode("R", c=1.0, children=(HierNode("a", c=1.0, leaf_p=0.0),))
    assert derived_failure_probability(node) == 0.0


def test_independent_joint_fix1(fix1):
    joint = independent_joint(fix1)
    assert len(joint.entries) == 4
    for _, prob in joint.entries:
        assert prob == pytest.approx(0.25, abs=1e-12)


def test_independent_joint_degenerate():
    joint = independent_joint(FlatSystem(components=(AtomicSpec("A", 1.0, 1.0),)))
    probs = {broken: p for broken, p in joint.entries}
    assert probs[frozenset({"A"})] == 1.0

    joint = independent_joint(FlatSystem(components=(AtomicSpec("A", 0.3, 1.0),)))
    probs = {broken: p for broken, p in joint.entries}
    assert probs[frozenset()] == pytest.approx(0.7)
    assert probs[frozenset({"A"})] == pytest.approx(0.3)


def test_independent_joint_limit():
    comps = tuple(AtomicSpec(f"c{i}", 0.5, 1.0) for i in range(21))
    with pytest.raises(LimitExceededError):
        independent_joint(FlatSystem(components=comps))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_ok_marginal_monotone_and_product_form(seed):
    rng = random.Random(seed)
    flat = random_flat(rng, rng.randint(1, 10))
    joint = independent_joint(flat)
    ids = list(flat.ids)
    small = set(rng.sample(ids, rng.randint(0, len(ids))))
    big = small | set(rng.sample(ids, rng.randint(0, len(ids))))
    assert ok_marginal(joint, small) >= ok_marginal(joint, big) - 1e-12
    prod = 1.0
    for cid in big:
        prod *= 1.0 - flat.by_id[cid].p
    assert ok_marginal(joint, big) == pytest.approx(prod, abs=1e-9)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_derived_probability_matches_leaf_enumeration(seed):
    rng = random.Random(seed)
    leaves = tuple(HierNode(f"l{i}", c=1.0, leaf_p=rng.random())
                   for i in range(rng.randint(1, 8)))
    node = HierNode("R", c=1.0, children=leaves)
    flat = FlatSystem(components=tuple(
        AtomicSpec(l.id, l.leaf_p, 1.0) for l in leaves))
    joint = independent_joint(flat)
    assert derived_failure_probability(node) == pytest.approx(
        1.0 - ok_marginal(joint, flat.ids), abs=1e-9)


def test_flat_roundtrip(tmp_path, fix3):
    path = tmp_path / "m.json"
    save_model(fix3, path)
    assert load_model(path) == fix3


def test_joint_roundtrip(tmp_path, fix4_system):
    path = tmp_path / "m.json"
    save_model(fix4_system, path)
    loaded = load_model(path)
    assert loaded.components == fix4_system.components
    assert dict(loaded.joint.entries) == dict(fix4_system.joint.entries)


def test_hier_roundtrip(tmp_path, fix5):
    path = tmp_path / "m.json"
    save_model(fix5, path)
    assert load_model(path) == fix5


def test_unknown_fields_rejected():
    with pytest.raises(ModelError, match="unknown fields"):
        model_from_dict({"type": "flat", "components": [
            {"id": "A", "p": 0.5, "c": 1.0, "color": "red"}]})
    with pytest.raises(ModelError, match="unknown fields"):
        model_from_dict({"type": "hier", "root": {"id": "R", "c": 1.0, "p": 0.5,
                                                  "extra": 1}})
