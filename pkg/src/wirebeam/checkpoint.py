"""Versioned binary container for trained agents.

Byte layout (format version 1, all integers little-endian):

    offset 0   4 bytes   magic b"WBQC"
    offset 4   uint32    format version (1)
    offset 8   uint32    H, byte length of the JSON header
    offset 12  H bytes   UTF-8 JSON header
    offset 12+H          payload: the raw bytes of every array listed in
                         header["arrays"], concatenated in order, each
                         row-major float64 little-endian

The header records the trunk/head shapes, the manifest (agent kind,
action count, training variant, seed, config hash), the Adam scalars, and
the serialized numpy RNG state. Array order is: trunk.{i}.w, trunk.{i}.b
for each trunk layer, value.w, value.b, adv.w, adv.b, then (when Adam
state is saved) adam.m.* and adam.v.* repeating the same order.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .deepq import AdamState, QNetwork

MAGIC = b"WBQC"
FORMAT_VERSION = 1


def _param_names(n_trunk: int) -> list:
    names = []
    for i in range(n_trunk):
        names.extend([f"trunk.{i}.w", f"trunk.{i}.b"])
    names.extend(["value.w", "value.b", "adv.w", "adv.b"])
    return names


@dataclass
class AgentCheckpoint:
    """A trained network plus optimizer state and provenance manifest."""

    net: QNetwork
    adam: AdamState | None = None
    manifest: dict | None = None
    rng_state: dict | None = None


def save_checkpoint(path, ckpt: AgentCheckpoint):
    net = ckpt.net
    names = _param_names(len(net.trunk_w))
    arrays = list(zip(names, net.parameters()))
    if ckpt.adam is not None:
        arrays += [(f"adam.m.{n}", a) for n, a in zip(names, ckpt.adam.first_moment)]
        arrays += [(f"adam.v.{n}", a) for n, a in zip(names, ckpt.adam.second_moment)]

    header = {
        "format_version": FORMAT_VERSION,
        "manifest": ckpt.manifest or {},
        "n_actions": net.n_actions,
        "n_inputs": net.n_inputs,
        "hidden": list(net.hidden),
        "arrays": [{"name": n, "shape": list(a.shape)} for n, a in arrays],
        "adam": None
        if ckpt.adam is None
        else {
            "learning_rate": ckpt.adam.learning_rate,
            "beta1": ckpt.adam.beta1,
            "beta2": ckpt.adam.beta2,
            "epsilon": ckpt.adam.epsilon,
            "step_count": ckpt.adam.step_count,
        },
        "rng_state": ckpt.rng_state,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(header_bytes)))
        fh.write(header_bytes)
        for _, arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> AgentCheckpoint:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file (bad magic)")
    version, header_len = struct.unpack("<II", raw[4:12])
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint format version {version}")
    header = json.loads(raw[12 : 12 + header_len].decode("utf-8"))

    offset = 12 + header_len
    arrays = {}
    for spec in header["arrays"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(shape)
        arrays[spec["name"]] = arr.astype(np.float64)
        offset += count * 8

    n_trunk = len(header["hidden"])
    names = _param_names(n_trunk)
    try:
        net = QNetwork(
            trunk_w=[arrays[f"trunk.{i}.w"] for i in range(n_trunk)],
            trunk_b=[arrays[f"trunk.{i}.b"] for i in range(n_trunk)],
            value_w=arrays["value.w"],
            value_b=arrays["value.b"],
            adv_w=arrays["adv.w"],
            adv_b=arrays["adv.b"],
        )
    except KeyError as exc:
        raise ValueError(f"{path}: checkpoint missing array {exc}") from exc
    expected_hidden = tuple(header["hidden"])
    if net.hidden != expected_hidden or net.n_actions != header["n_actions"]:
        raise ValueError(f"{path}: array shapes disagree with the declared layout")

    adam = None
    if header["adam"] is not None:
        a = header["adam"]
        adam = AdamState(
            first_moment=[arrays[f"adam.m.{n}"] for n in names],
            second_moment=[arrays[f"adam.v.{n}"] for n in names],
            step_count=a["step_count"],
            learning_rate=a["learning_rate"],
            beta1=a["beta1"],
            beta2=a["beta2"],
            epsilon=a["epsilon"],
        )
    return AgentCheckpoint(
        net=net, adam=adam, manifest=header["manifest"], rng_state=header["rng_state"]
    )
