"""Binary checkpoint format.

Layout::

    MAGIC                      b"BETAGRAPH-CKPT\\x00v1\\n"
    header length              uint64, little-endian
    header                     UTF-8 JSON, sorted keys
    tensor data                little-endian float32, concatenated in the
                               order of ``header["tensors"]``

Each ``header["tensors"]`` entry is ``{"name", "shape"}``. Tensor names are
prefixed ``param.`` (raw weights), ``ema.`` (moving average) or ``adam.``
(optimizer moments), so one file is enough to resume training exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..errors import ContractError
from .model import DenoiserConfig, GraphTransformer

MAGIC = b"BETAGRAPH-CKPT\x00v1\n"
_LE_F32 = np.dtype("<f4")


def save_checkpoint(path, params: dict, header: dict | None = None, ema: dict | None = None, extra: dict | None = None) -> None:
    """Write raw parameters (and optionally EMA and extra tensors) to ``path``."""
    named = [(f"param.{k}", v) for k, v in params.items()]
    named += [(f"ema.{k}", v) for k, v in (ema or {}).items()]
    named += [(k, v) for k, v in (extra or {}).items()]
    header = dict(header or {})
    header["tensors"] = [{"name": k, "shape": list(v.shape)} for k, v in named]
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for _, v in named:
            arr = v.detach().cpu().numpy() if isinstance(v, torch.Tensor) else np.asarray(v)
            fh.write(np.ascontiguousarray(arr, dtype=_LE_F32).tobytes())


@dataclass
class Checkpoint:
    header: dict
    params: dict[str, torch.Tensor]
    ema: dict[str, torch.Tensor]
    extra: dict[str, torch.Tensor]

    @property
    def config(self) -> DenoiserConfig:
        return DenoiserConfig(**self.header["denoiser"])

    def model(self, which: str = "ema") -> GraphTransformer:
        """Rebuild the network from the ``"ema"`` or ``"raw"`` weights."""
        state = self.ema if which == "ema" and self.ema else self.params
        T = self.header.get("schedule", {}).get("T", 1000)
        m = GraphTransformer(self.config, T)
        expected = m.state_dict()
        problems = [
            f"{k}: checkpoint {tuple(state[k].shape) if k in state else 'missing'} vs model {tuple(v.shape)}"
            for k, v in expected.items()
            if k not in state or tuple(state[k].shape) != tuple(v.shape)
        ]
        problems += [f"{k}: unexpected tensor" for k in state if k not in expected]
        if problems:
            raise ContractError("checkpoint does not match the denoiser config: " + "; ".join(problems[:5]))
        m.load_state_dict(state)
        m.eval()
        return m


def load_checkpoint(path, expected: DenoiserConfig | None = None) -> Checkpoint:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(MAGIC):
        raise ContractError(f"{path}: not a checkpoint (bad magic or version)")
    off = len(MAGIC)
    if len(data) < off + 8:
        raise ContractError(f"{path}: truncated header")
    (hlen,) = struct.unpack("<Q", data[off : off + 8])
    off += 8
    header = json.loads(data[off : off + hlen].decode("utf-8"))
    off += hlen
    params, ema, extra = {}, {}, {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        end = off + 4 * count
        if end > len(data):
            raise ContractError(f"{path}: truncated tensor {entry['name']}")
        arr = np.frombuffer(data[off:end], dtype=_LE_F32).reshape(shape).astype(np.float32)
        off = end
        name = entry["name"]
        tensor = torch.from_numpy(arr.copy())
        if name.startswith("param."):
            params[name[6:]] = tensor
        elif name.startswith("ema."):
            ema[name[4:]] = tensor
        else:
            extra[name] = tensor
    if off != len(data):
        raise ContractError(f"{path}: {len(data) - off} trailing bytes")
    ckpt = Checkpoint(header, params, ema, extra)
    if expected is not None and "denoiser" in header:
        found = ckpt.config
        if found != expected:
            diffs = [
                f"{k}={getattr(found, k)} (expected {getattr(expected, k)})"
                for k in expected.to_dict()
                if getattr(found, k) != getattr(expected, k)
            ]
            raise ContractError("checkpoint config mismatch: " + ", ".join(diffs))
    return ckpt
