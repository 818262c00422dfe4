import json
import os
from typing import Any, Dict, Iterable, List


def dump_record(record: Dict[str, Any]) -> str:
    """Canonical one-line JSON: sorted keys, no spaces, so equal records are equal bytes."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def read_records(file_path: str) -> List[Dict[str, Any]]:
    """
    Reads a line-delimited JSON file and returns its records.

    Args:
        file_path (str): Path to the file.

    Returns:
        List[Dict[str, Any]]: One dict per non-blank line.

    Raises:
        ValueError: If a line is not a JSON object.
    """
    records = []
    with open(file_path, "r") as file:
        for number, line in enumerate(file, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{file_path}:{number}: {exc}") from exc
            if not isinstance(record, dict):
                raise ValueError(f"{file_path}:{number}: not an object")
            records.append(record)
    return records


def write_records(file_path: str, records: Iterable[Dict[str, Any]]) -> None:
    write_lines(file_path, (dump_record(r) for r in records))


def write_lines(file_path: str, lines: Iterable[str]) -> None:
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, "w") as file:
        for line in lines:
            file.write(line + "\n")
