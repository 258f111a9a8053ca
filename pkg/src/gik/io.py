"""JSON encoding of instances and chains (rationals as strings)."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InvalidInstance
from .instance import Chain, Instance, format_fraction, validate_instance


def instance_to_dict(inst: Instance) -> dict:
    items = inst.items
    out = {
        "weights": [format_fraction(inst.weights[i]) for i in items],
        "capacities": [format_fraction(c) for c in inst.capacities],
        "profits": [[format_fraction(x) for x in inst.profits[i]] for i in items],
    }
    if inst.labels is not None:
        out["item_ids"] = [inst.labels[i] for i in items]
    return out


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst)) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"malformed JSON: {exc}") from exc
    return validate_instance(raw)


def load_instance(path: str | Path) -> Instance:
    return loads_instance(Path(path).read_text())


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(inst))


def chain_to_json(c: Chain) -> list[list[int]]:
    return c.to_lists()


def chain_from_json(data) -> Chain:
    return Chain(tuple(frozenset(int(i) for i in s) for s in data))
