"""Select the compiled or pure-Python kernel module.

The compiled extension is used when it imports; setting the environment
variable ``GRAPHZOOM_BACKEND=python`` forces the fallback. :func:`use` swaps
backends at runtime (tests and benchmarks use it).
"""

import importlib
import logging
import os

log = logging.getLogger(__name__)

_NAMES = ("compiled", "python")
core = None
name = None


def _load(which):
    if which == "compiled":
        return importlib.import_module("graphzoom._core")
    return importlib.import_module("graphzoom._pycore")


def available():
    """Backends that can be loaded in this environment."""
    out = []
    for which in _NAMES:
        try:
            _load(which)
        except ImportError:
            continue
        out.append(which)
    return out


def use(which):
    """Switch the active backend and return the previous name."""
    global core, name
    if which not in _NAMES:
        raise ValueError(f"unknown backend {which!r}; choose from {_NAMES}")
    prev = name
    core = _load(which)
    name = which
    return prev


def _init():
    wanted = os.environ.get("GRAPHZOOM_BACKEND", "compiled").lower()
    if wanted == "python":
        use("python")
        return
    try:
        use("compiled")
    except ImportError:
        log.info("compiled kernels unavailable; using pure-Python fallback")
        use("python")


_init()
