import argparse
from typing import Optional

import numpy as np


def parse_scale(text: str) -> Optional[float]:
    """`auto` means max(2, sqrt(d)), resolved at build time."""
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"scale must be a number or 'auto', got {text!r}")
    if value < 2:
        raise argparse.ArgumentTypeError("scale must be at least 2")
    return value


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def emit(**fields) -> None:
    """One `key=value` line per field."""
    for key, value in fields.items():
        print(f"{key}={format_value(value)}")


def emit_record(**fields) -> None:
    """All fields on one space-separated line."""
    print(" ".join(f"{key}={format_value(value)}" for key, value in fields.items()))
