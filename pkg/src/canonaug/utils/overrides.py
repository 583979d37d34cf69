"""Recursive merging of configuration overrides."""

from typing import Any


def merge_with_overrides(base: dict[str, Any], *, overrides: dict[str, Any]) -> dict[str, Any]:
    """Merge an override mapping into a base configuration mapping.

    Nested mappings merge key by key. Lists merge by position, so an override
    list of method configs patches the matching entries and keeps the rest.
    Scalars are replaced.

    Parameters
    ----------
    base : dict[str, Any]
        Configuration loaded from file or defaults. Not mutated.
    overrides : dict[str, Any]
        Values taking precedence, usually from the command line.

    Returns
    -------
    dict[str, Any]
        The merged mapping.
    """
    merged: dict[str, Any] = base.copy()

    for key, override_value in overrides.items():
        base_value = merged.get(key)

        if isinstance(base_value, dict) and isinstance(override_value, dict):
            merged[key] = merge_with_overrides(base_value, overrides=override_value)
        elif isinstance(base_value, list) and isinstance(override_value, list):
            combined: list[Any] = []
            for index in range(max(len(base_value), len(override_value))):
                if index >= len(override_value):
                    combined.append(base_value[index])
                elif index < len(base_value) and isinstance(base_value[index], dict) and isinstance(
                    override_value[index], dict
                ):
                    combined.append(merge_with_overrides(base_value[index], overrides=override_value[index]))
                else:
                    combined.append(override_value[index])
            merged[key] = combined
        else:
            merged[key] = override_value

    return merged


def parse_override(assignment: str) -> dict[str, Any]:
    """Turn a ``dotted.key=value`` string into a nested override mapping.

    The value is read as JSON when possible (numbers, booleans, lists) and kept
    as a string otherwise.

    Examples
    --------
    >>> parse_override("rerank.beta=0")
    {'rerank': {'beta': 0}}
    >>> parse_override("generator=from_d")
    {'generator': 'from_d'}
    """
    import orjson

    if "=" not in assignment:
        raise ValueError(f"Override '{assignment}' must look like key=value")
    dotted, raw = assignment.split("=", 1)
    try:
        value: Any = orjson.loads(raw)
    except orjson.JSONDecodeError:
        value = raw

    nested: dict[str, Any] = {}
    cursor = nested
    keys = dotted.strip().split(".")
    for key in keys[:-1]:
        cursor = cursor.setdefault(key, {})
    cursor[keys[-1]] = value
    return nested
