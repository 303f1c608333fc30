"""Kernel backend selection.

Prefers the compiled extension `_kernels`; falls back to the pure-numpy
`_kernels_py` when the extension is unavailable.  Set LYAPDIM_BACKEND to
"compiled" or "python" to force a choice (forcing "compiled" raises if the
extension failed to build).
"""

import os

from . import _kernels_py

_forced = os.environ.get("LYAPDIM_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced == "compiled":
    from . import _kernels as _impl  # noqa: F401  (ImportError is the message)
elif _forced:
    raise ValueError(
        f"LYAPDIM_BACKEND must be 'compiled' or 'python', got {_forced!r}"
    )
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND_NAME

rk4_state = _impl.rk4_state
rk4_state_record = _impl.rk4_state_record
rk4_aug = _impl.rk4_aug
benettin = _impl.benettin
