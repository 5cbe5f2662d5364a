"""Run records: a nested key/value text document that fully describes a run.

The writer is deterministic: insertion order of the input mapping is the
field order, floats render through repr, and no timestamps or environment
state are ever included, so identical runs produce identical bytes.
"""


def _scalar(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _is_scalar(value) -> bool:
    return not isinstance(value, (dict, list, tuple))


def _emit(value, indent: int, lines: list) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if _is_scalar(item):
                lines.append(f"{pad}{key}: {_scalar(item)}")
            else:
                lines.append(f"{pad}{key}:")
                _emit(item, indent + 1, lines)
    elif isinstance(value, (list, tuple)):
        for item in value:
            if _is_scalar(item):
                lines.append(f"{pad}- {_scalar(item)}")
            else:
                lines.append(f"{pad}-")
                _emit(item, indent + 1, lines)
    else:
        lines.append(f"{pad}{_scalar(value)}")


def format_run_record(record: dict) -> str:
    """Render a nested mapping as an indented key/value document."""
    lines = []
    _emit(record, 0, lines)
    return "\n".join(lines) + "\n"
