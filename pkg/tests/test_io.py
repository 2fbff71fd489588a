import json

import numpy as np
import pytest

from causal_pomdp import io
from causal_pomdp.examples import tiger_model
from causal_pomdp.planning import greedy_policy, plan, reactive_policy


def test_dumps_is_deterministic_and_round_trips_floats():
    x = {"b": [0.1 + 0.2, 1 / 3], "a": 1e-17}
    text = io.dumps(x)
    assert text == io.dumps(x) and text.endswith("\n")
    assert json.loads(text) == x
    with pytest.raises(ValueError):
        io.dumps({"nan": float("nan")})


def test_write_atomic(tmp_path):
    p = tmp_path / "sub" / "out.json"
    io.write_atomic(p, "one")
    io.write_atomic(p, "two")
    assert p.read_text() == "two"
    assert [f.name for f in p.parent.iterdir()] == ["out.json"]


def test_alpha_set_round_trip():
    m = tiger_model()
    stages = plan(m, m.domain_set(), 3)
    doc = json.loads(io.dumps(io.plan_to_dict(m, stages)))
    back = io.load_alpha_stages(m, doc)
    assert all(a.identical(b) for a, b in zip(stages, back))
    single = io.load_alpha_stages(m, io.alpha_set_to_dict(m, stages[2]))
    assert single[0].identical(stages[2])


def test_policy_round_trip(tmp_path):
    m = tiger_model()
    pol = reactive_policy(m, "listen", {"Z=hl": "open-right", "Z=hr": "open-left"})
    doc = io.policy_to_dict(m, pol)
    assert doc == {"kind": "reactive", "initial": "listen",
                   "map": {"Z=hl": "open-right", "Z=hr": "open-left"}}
    assert io.policy_from_dict(m, doc) == pol

    D = m.domain_set()
    stages = plan(m, D, 2)
    io.write_atomic(tmp_path / "stages.json", io.dumps(io.plan_to_dict(m, stages)))
    g = io.policy_from_dict(m, io.policy_to_dict(m, greedy_policy(stages, D), "stages.json"), tmp_path)
    assert g.kind == "greedy" and g.domains.names == D.names
    with pytest.raises(ValueError):
        io.policy_from_dict(m, {"kind": "lookup"})


def test_load_beliefs_shapes():
    m = tiger_model()
    D = m.domain_set(["base"])
    bs = io.load_beliefs([[0.25] * 4], m, D)
    np.testing.assert_allclose(bs[0].table[:, 0], 0.25)
    with pytest.raises(ValueError):
        io.load_beliefs([[0.5, 0.5]], m, D)


def test_manifest_fields(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("{}")
    man = io.manifest("plan", {"b": 1, "a": 2}, p, seed=3, started=0.0, extra={"x": 1})
    assert list(man["arguments"]) == ["a", "b"]
    assert man["seed"] == 3 and man["x"] == 1 and len(man["model_sha256"]) == 64
