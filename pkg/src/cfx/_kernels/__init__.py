"""Kernel backend selection.

The compiled Cython extension is preferred when importable; the numpy
fallback is behaviorally equivalent (see tests/test_kernels.py for the
parity checks). Set CFX_KERNELS=py to force the fallback, or CFX_KERNELS=c
to require the extension.
"""

import os

from . import _pykernels

_choice = os.environ.get("CFX_KERNELS", "").lower()

if _choice == "py":
    BACKEND = "numpy"
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _choice == "c":
            raise
        BACKEND = "numpy"
        _impl = _pykernels

crf_forward_backward = _impl.crf_forward_backward
crf_viterbi = _impl.crf_viterbi
pegasos_epochs = _impl.pegasos_epochs

__all__ = ["BACKEND", "crf_forward_backward", "crf_viterbi", "pegasos_epochs"]
