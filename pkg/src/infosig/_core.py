"""Kernel backend selection: compiled extension when importable, else pure Python."""

from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active: ModuleType = _compiled if _compiled is not None else _pykernels


def backend_name() -> str:
    return "cython" if _active is _compiled else "python"


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


def use_backend(name: str) -> None:
    """Switch kernels globally; ``name`` is 'cython' or 'python'."""
    global _active
    if name == "python":
        _active = _pykernels
    elif name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available in this build")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


def kernels() -> ModuleType:
    return _active
