"""File formats: alpha sets, policies, beliefs, run manifests; atomic writes."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from pathlib import Path

import numpy as np

from .belief import JointBelief
from .interventions import DomainSet
from .model import CausalPOMDP
from .planning.alpha import AlphaSet
from .planning.policy import PolicySpec, greedy_policy, reactive_policy


def dumps(obj) -> str:
    """Deterministic JSON text; floats use Python's shortest round-trip repr."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# -- alpha sets --------------------------------------------------------------


def alpha_set_to_dict(model: CausalPOMDP, alphas: AlphaSet) -> dict:
    out = []
    for i in range(len(alphas)):
        succ = {}
        if alphas.successors is not None:
            succ = {
                model.observation_key(o): int(j) for o, j in enumerate(alphas.successors[i])
            }
        out.append(
            {
                "action": model.actions[int(alphas.actions[i])],
                "values": alphas.values[i].tolist(),
                "successors": succ,
            }
        )
    return {"stage": alphas.stage, "domains": list(alphas.domain_names), "alphas": out}


def alpha_set_from_dict(model: CausalPOMDP, doc: dict) -> AlphaSet:
    items = doc["alphas"]
    values = np.array([it["values"] for it in items], dtype=float)
    actions = [model.action_index[it["action"]] for it in items]
    succ = None
    if items and items[0].get("successors"):
        succ = np.array(
            [
                [it["successors"][model.observation_key(o)] for o in range(model.n_observations)]
                for it in items
            ],
            dtype=int,
        )
    elif int(doc["stage"]) == 0:
        succ = np.zeros((len(items), 0), dtype=int)
    return AlphaSet(
        int(doc["stage"]), values, actions, succ,
        action_labels=model.actions, domain_names=doc.get("domains", []),
    )


def plan_to_dict(model: CausalPOMDP, stages) -> dict:
    return {"stages": [alpha_set_to_dict(model, s) for s in stages]}


def load_alpha_stages(model: CausalPOMDP, doc) -> list[AlphaSet]:
    """Accept a single AlphaSet document or a ``{"stages": [...]}`` plan document."""
    if "stages" in doc:
        return [alpha_set_from_dict(model, d) for d in doc["stages"]]
    return [alpha_set_from_dict(model, doc)]


# -- policies ----------------------------------------------------------------


def policy_from_dict(model: CausalPOMDP, doc: dict, base_dir=".") -> PolicySpec:
    kind = doc.get("kind")
    if kind == "reactive":
        return reactive_policy(model, doc["initial"], doc["map"])
    if kind == "greedy":
        path = Path(doc["alphas"])
        if not path.is_absolute():
            path = Path(base_dir) / path
        stages = load_alpha_stages(model, read_json(path))
        names = stages[-1].domain_names or ("base",)
        return greedy_policy(stages, model.domain_set(list(names)))
    raise ValueError(f"unknown policy kind {kind!r}")


def policy_to_dict(model: CausalPOMDP, policy: PolicySpec, alphas_path: str | None = None) -> dict:
    if policy.kind == "reactive":
        return {
            "kind": "reactive",
            "initial": policy.initial,
            "map": {model.observation_key(o): a for o, a in sorted(policy.mapping.items())},
        }
    return {"kind": "greedy", "alphas": alphas_path}


# -- beliefs -----------------------------------------------------------------


def belief_record(step: int, b: JointBelief) -> dict:
    return {
        "step": step,
        "belief": b.table.tolist(),
        "state_marginal": b.state_marginal().tolist(),
        "domain_marginal": b.domain_marginal().tolist(),
    }


def load_beliefs(doc, model: CausalPOMDP, domains: DomainSet) -> list[JointBelief]:
    """A list of joint beliefs, each state-major ``[[b(s, d) for d] for s]``.

    A flat list of length ``|S|`` is accepted when there is a single domain.
    """
    out = []
    for i, item in enumerate(doc):
        t = np.asarray(item, dtype=float)
        if t.ndim == 1 and len(domains) == 1:
            t = t[:, None]
        if t.shape != (model.n_states, len(domains)):
            raise ValueError(f"belief {i} has shape {t.shape}, expected ({model.n_states}, {len(domains)})")
        out.append(JointBelief(t))
    return out


# -- manifests ---------------------------------------------------------------


def file_hash(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def manifest(command: str, args: dict, model_path=None, seed=None, started: float | None = None, extra=None) -> dict:
    from . import __version__

    out = {
        "command": command,
        "arguments": {k: v for k, v in sorted(args.items())},
        "model_sha256": file_hash(model_path) if model_path else None,
        "seed": seed,
        "version": __version__,
        "wall_time_s": None if started is None else round(time.time() - started, 6),
    }
    if extra:
        out.update(extra)
    return out
