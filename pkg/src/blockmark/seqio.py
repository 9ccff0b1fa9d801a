"""File formats: JSON-lines token sequences, key files, report output."""
from __future__ import annotations

import json
from pathlib import Path

from .generation import TokenSequence
from .keying import SecretKey

FORMAT_VERSION = 1


def write_sequences(path, seqs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in seqs:
            rec = {"tokens": seq.tokens.tolist(),
                   "vocab_size": seq.vocab_size,
                   "meta": dict(seq.meta, format_version=FORMAT_VERSION)}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_sequences(path) -> list[TokenSequence]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(TokenSequence(rec["tokens"], rec["vocab_size"],
                                     meta=rec.get("meta", {})))
    return out


def read_key(path) -> SecretKey:
    text = Path(path).read_text(encoding="utf-8").strip()
    if len(text) != 64:
        raise ValueError("key file must hold exactly 64 hex characters")
    return SecretKey.from_hex(text)


def write_key(path, key: SecretKey) -> None:
    Path(path).write_text(key.to_hex() + "\n", encoding="utf-8")
