"""
File plumbing shared by the writers: atomic replacement, content hashes and the
number format used in every CSV the toolkit emits.
"""

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

PathLike = Union[str, os.PathLike]

# 17 significant digits round-trip every IEEE double exactly
FLOAT_FORMAT = ".17g"


def fmt(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def atomic_write_text(path: PathLike, text: str) -> Path:
    """
    Write `text` to a temporary file next to `path` and rename it into place.

    :param path: destination file
    :param text: full file contents
    :return: the destination as a Path
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def atomic_write_json(path: PathLike, payload: Any) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([fmt(v) if isinstance(v, float) else v for v in row] for row in rows)
    return buffer.getvalue()


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sidecar_path(path: PathLike) -> Path:
    """
    Metadata sidecar that accompanies a data file: `table.csv` -> `table.csv.meta.json`.
    """
    p = Path(path)
    return p.with_name(p.name + ".meta.json")
