"""Working-precision selection.

Double precision uses :mod:`cmath`; anything above 15 digits switches the
numeric kernels to a private :class:`mpmath.MPContext`, so raising the
precision never touches mpmath's global state.
"""

from __future__ import annotations

import cmath
import contextlib
import contextvars
import math
import os

import mpmath

ENV_VAR = "THETA_FORGE_PRECISION"


class _DoubleOps:
    dps = 15
    eps = 2.0**-52
    tail = 1e-17
    pi = math.pi
    exp = staticmethod(cmath.exp)
    sin = staticmethod(cmath.sin)
    cos = staticmethod(cmath.cos)
    sqrt = staticmethod(cmath.sqrt)
    log = staticmethod(cmath.log)

    @staticmethod
    def num(x):
        return complex(x)

    def __repr__(self):
        return "DoubleOps()"


class _MpOps:
    def __init__(self, dps: int):
        self.dps = dps
        self._ctx = mpmath.MPContext()
        self._ctx.dps = dps + 5
        self.eps = 10.0 ** (-dps)
        self.tail = self._ctx.mpf(10) ** (-(dps + 3))
        self.pi = self._ctx.pi
        self.exp = self._ctx.exp
        self.sin = self._ctx.sin
        self.cos = self._ctx.cos
        self.sqrt = self._ctx.sqrt
        self.log = self._ctx.log

    def num(self, x):
        return self._ctx.mpc(x)

    def __repr__(self):
        return f"MpOps(dps={self.dps})"


_DOUBLE = _DoubleOps()


def _from_env():
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return _DOUBLE
    dps = int(raw)
    return _DOUBLE if dps <= 15 else _MpOps(dps)


_current: contextvars.ContextVar = contextvars.ContextVar("theta_forge_ops", default=None)


def ops():
    """Arithmetic namespace for the active precision."""
    o = _current.get()
    if o is None:
        o = _from_env()
        _current.set(o)
    return o


@contextlib.contextmanager
def working_precision(dps: int):
    """Temporarily evaluate with ``dps`` significant decimal digits."""
    token = _current.set(_DOUBLE if dps <= 15 else _MpOps(dps))
    try:
        yield ops()
    finally:
        _current.reset(token)


def is_double() -> bool:
    return isinstance(ops(), _DoubleOps)
