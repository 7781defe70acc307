"""Backend selection for the per-term integral.

The compiled extension is used when it imports and the environment variable
``LIFSHITZ_PURE_PYTHON`` is unset; bodies carrying a graphene sheet always go
through the numpy implementation because their polarization tensor is a
Python callback.
"""
import os

import numpy as np

from . import _kernel_py
from .layered import PERFECT, LayeredBody, body_reflection, encode, stack_reflection
from .materials.models import Vacuum

FREE_ENERGY = _kernel_py.FREE_ENERGY
PRESSURE = _kernel_py.PRESSURE

_compiled = None
if not os.environ.get("LIFSHITZ_PURE_PYTHON"):
    try:
        from . import _kernel as _compiled
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def _python_reflector(body, encoded, l, T, xi):
    if encoded is None:
        return lambda q, kperp2: body_reflection(body, l, T, xi, q, kperp2)
    kind, media = encoded
    if kind == PERFECT:
        return lambda q, kperp2: (np.ones_like(q), np.ones_like(q))
    return lambda q, kperp2: stack_reflection(media, q, kperp2)


def transparent(body):
    """True for bodies made of vacuum only, whose reflection vanishes identically."""
    if isinstance(body, Vacuum):
        return True
    return (isinstance(body, LayeredBody) and body.graphene is None
            and isinstance(body.substrate, Vacuum)
            and all(isinstance(m, Vacuum) for m, _ in body.layers))


def integrate_term(quantity, y_lo, two_a, body1, body2, l, T, xi, rtol, max_evals,
                   backend=None):
    """Integral over y in [y_lo, y_lo + 60] of one Matsubara term.

    Returns ``(value, abs_error, n_evals, converged)``.
    """
    backend = backend or BACKEND
    if transparent(body1) or transparent(body2):
        return 0.0, 0.0, 0, True
    e1 = encode(body1, l, T, xi)
    e2 = encode(body2, l, T, xi)
    if backend == "compiled" and _compiled is not None and e1 is not None and e2 is not None:
        return _compiled.integrate_stack(quantity, y_lo, two_a, e1[0], e1[1], e2[0], e2[1],
                                         rtol, max_evals)
    r1 = _python_reflector(body1, e1, l, T, xi)
    r2 = _python_reflector(body2, e2, l, T, xi)
    return _kernel_py.integrate_term(quantity, y_lo, two_a, r1, r2, rtol, max_evals)
