"""Python bindings for the ENIAC exploration toolkit."""

import json

from ._core import *  # noqa: F401,F403
from ._core import lock_benchmark, run_single


def load_config(text_or_dict):
    """Accept a JSON string or a dict and return JSON text."""
    if isinstance(text_or_dict, dict):
        return json.dumps(text_or_dict)
    return text_or_dict


def run(config, seed=0):
    return run_single(load_config(config), seed)
