"""JSON game/policy files and CSV trace output.

Matrices are nested row-major lists. Python's float repr round-trips exactly,
so spec -> JSON -> spec is lossless.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .game import GameSpec, GaussianInit, JointPolicy, MixtureInit

TRACE_HEADER = ("iter", "player", "cost", "normalized_error", "max_E_norm")


def _m(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def spec_to_dict(spec: GameSpec) -> dict:
    law = spec.init_law
    if isinstance(law, GaussianInit):
        init = {"type": "gaussian", "mean": _m(law.mean), "cov": _m(law.cov)}
    else:
        init = {"type": "mixture", "points": _m(law.points), "probs": _m(law.probs)}
    return {
        "num_players": spec.num_players,
        "horizon": spec.horizon,
        "state_dim": spec.state_dim,
        "control_dims": list(spec.control_dims),
        "a_mats": [_m(a) for a in spec.a_mats],
        "b_mats": [[_m(b) for b in bi] for bi in spec.b_mats],
        "q_mats": [[_m(q) for q in qi] for qi in spec.q_mats],
        "r_mats": [[_m(r) for r in ri] for ri in spec.r_mats],
        "noise_cov": _m(spec.noise_cov),
        "init_law": init,
    }


def spec_from_dict(data: dict) -> GameSpec:
    init = data["init_law"]
    kind = init.get("type", "gaussian")
    if kind == "gaussian":
        law = GaussianInit(init["mean"], init["cov"])
    elif kind == "mixture":
        law = MixtureInit(init["points"], init["probs"])
    else:
        raise ValueError(f"unknown init_law type {kind!r}")
    return GameSpec(
        num_players=int(data["num_players"]),
        horizon=int(data["horizon"]),
        state_dim=int(data["state_dim"]),
        control_dims=tuple(data["control_dims"]),
        a_mats=tuple(np.array(a, dtype=float) for a in data["a_mats"]),
        b_mats=tuple(tuple(np.array(b, dtype=float) for b in bi) for bi in data["b_mats"]),
        q_mats=tuple(tuple(np.array(q, dtype=float) for q in qi) for qi in data["q_mats"]),
        r_mats=tuple(tuple(np.array(r, dtype=float) for r in ri) for ri in data["r_mats"]),
        noise_cov=np.array(data["noise_cov"], dtype=float),
        init_law=law,
    )


def policy_to_dict(policy: JointPolicy) -> dict:
    return {"gains": [[_m(k) for k in gi] for gi in policy.gains]}


def policy_from_dict(data: dict) -> JointPolicy:
    return JointPolicy(tuple(
        tuple(np.array(k, dtype=float).reshape(len(k), -1) for k in gi) for gi in data["gains"]
    ))


def nash_to_dict(nash) -> dict:
    return {
        "k_star": policy_to_dict(nash.k_star)["gains"],
        "p_star": [[_m(p) for p in pi] for pi in nash.p_star],
        "n_star": [list(n) for n in nash.n_star],
        "eq_costs": list(nash.eq_costs),
    }


def evaluation_to_dict(ev) -> dict:
    return {
        "p_k": [[_m(p) for p in pi] for pi in ev.p_k],
        "n_k": [list(n) for n in ev.n_k],
        "sigma_t": [_m(s) for s in ev.sigma_t],
        "sigma_sum": _m(ev.sigma_sum),
        "e_mats": [[_m(e) for e in ei] for ei in ev.e_mats],
        "grads": [[_m(g) for g in gi] for gi in ev.grads],
        "costs": list(ev.costs),
    }


def read_json(path) -> dict:
    with open(path) as f:
        return json.load(f)


def write_json(obj: dict, path) -> None:
    text = json.dumps(obj, indent=2)
    if path is None or str(path) == "-":
        print(text)
        return
    Path(path).write_text(text + "\n")


def load_spec(path) -> GameSpec:
    return spec_from_dict(read_json(path))


def save_spec(spec: GameSpec, path) -> None:
    write_json(spec_to_dict(spec), path)


def load_policy(path) -> JointPolicy:
    return policy_from_dict(read_json(path))


def save_policy(policy: JointPolicy, path) -> None:
    write_json(policy_to_dict(policy), path)


def _fmt(x: float) -> str:
    return repr(float(x))


def _trace_rows(trace, f) -> None:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    errs = trace.normalized_errors
    for m in range(len(trace.costs)):
        for i in range(trace.costs.shape[1]):
            err = "" if errs is None else _fmt(errs[m, i])
            w.writerow((m, i, _fmt(trace.costs[m, i]), err, _fmt(trace.max_e_norm[m])))


def write_trace_csv(trace, path) -> None:
    """Long format: one row per (iteration, player), players numbered from 0.

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _trace_rows(trace, path)
        return
    with open(path, "w", newline="") as f:
        _trace_rows(trace, f)


def read_trace_csv(path) -> list:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
