"""Strict JSON loading for input documents."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from ..core.exceptions import SpecError

logger = logging.getLogger(__name__)


def _reject_constant(name: str):
    raise ValueError(f"{name} is not valid JSON")


def load_json_text(text: str, source: str = "<input>") -> Dict[str, Any]:
    """Parse a JSON object; NaN and Infinity are rejected."""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise SpecError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", source)
    except ValueError as e:
        raise SpecError(str(e), source)
    if not isinstance(data, dict):
        raise SpecError(f"expected a JSON object, got {type(data).__name__}", source)
    return data


def load_json_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(e.errno, f"cannot read input document: {e.strerror}", str(path)) from e
    logger.debug(f"Loaded {len(text)} characters from {path}")
    return load_json_text(text, str(path))
