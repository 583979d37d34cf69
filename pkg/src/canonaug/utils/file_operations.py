"""File helpers for datasets, reports and pipeline state directories."""

from __future__ import annotations

import hashlib
import shutil
from collections.abc import Iterable, Iterator, Mapping
from pathlib import Path
from typing import Any

import orjson
from loguru import logger
from rust_ok import Err, Ok, Result

_JSON_OPTIONS = orjson.OPT_SORT_KEYS


def audit_file(fpath: Path) -> Result[Path, FileNotFoundError]:
    """Check that a path exists.

    Parameters
    ----------
    fpath : Path
        The file path to check.

    Returns
    -------
    Result[Path, FileNotFoundError]
        Ok(Path) if the file exists, Err(FileNotFoundError) otherwise.
    """
    if fpath.exists():
        return Ok(fpath)
    return Err(FileNotFoundError(f"Missing required file: {fpath}"))


def reset_directory(folder_path: Path | str) -> Path:
    """Create ``folder_path`` empty, moving any previous content aside to ``<name>_backup``."""
    folder_path = Path(folder_path)
    if folder_path.exists():
        backup = folder_path.with_name(f"{folder_path.name}_backup")
        if backup.exists():
            logger.debug("Removing stale backup {}", backup)
            shutil.rmtree(backup)
        shutil.move(str(folder_path), str(backup))
        logger.info("Moved previous contents of {} to {}", folder_path, backup)
    folder_path.mkdir(parents=True)
    return folder_path


def dumps(payload: Any) -> bytes:
    """Serialize with sorted keys so identical payloads give identical bytes."""
    return orjson.dumps(payload, option=_JSON_OPTIONS)


def write_json(fpath: Path, payload: Any) -> Path:
    """Write one JSON document."""
    fpath.parent.mkdir(parents=True, exist_ok=True)
    fpath.write_bytes(orjson.dumps(payload, option=_JSON_OPTIONS | orjson.OPT_INDENT_2))
    return fpath


def read_json(fpath: Path) -> Any:
    """Read one JSON document."""
    result = audit_file(Path(fpath))
    if result.is_err():
        raise result.err()
    return orjson.loads(result.value.read_bytes())


def write_jsonl(fpath: Path, records: Iterable[Mapping[str, Any]]) -> int:
    """Write newline-delimited records and return how many were written."""
    fpath.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(fpath, "wb") as f_out:
        for record in records:
            f_out.write(dumps(dict(record)))
            f_out.write(b"\n")
            count += 1
    logger.debug("Wrote {} records to {}", count, fpath)
    return count


def iter_jsonl(fpath: Path) -> Iterator[dict[str, Any]]:
    """Yield records from a newline-delimited file, skipping blank lines."""
    result = audit_file(Path(fpath))
    if result.is_err():
        raise result.err()
    path = result.value
    with open(path, "rb") as f_in:
        for line_number, line in enumerate(f_in, start=1):
            if not line.strip():
                continue
            try:
                yield orjson.loads(line)
            except orjson.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_number}: invalid JSON record ({exc})") from exc


def read_jsonl(fpath: Path) -> list[dict[str, Any]]:
    """Read every record of a newline-delimited file."""
    return list(iter_jsonl(fpath))


def sha256_hex(payload: bytes | str) -> str:
    """Return the hex sha256 digest of text or bytes."""
    data = payload.encode() if isinstance(payload, str) else payload
    return hashlib.sha256(data).hexdigest()
