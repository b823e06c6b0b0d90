"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``GENBELL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from genbell import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("GENBELL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from genbell import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _pykernels

mode_contract = _impl.mode_contract
fwht = _impl.fwht
walsh_l1 = _impl.walsh_l1
tmod = _impl.tmod
tmod_angles = _impl.tmod_angles
zb_settings_angles = _impl.zb_settings_angles
AngleObjective = _impl.AngleObjective
golden_line = _pykernels.golden_line

euler_axes = _pykernels.euler_axes
unit_vector = _pykernels.unit_vector

__all__ = [
    "BACKEND", "mode_contract", "fwht", "walsh_l1", "tmod", "tmod_angles",
    "zb_settings_angles", "AngleObjective", "euler_axes", "unit_vector",
]
