"""Backend selection: compiled extension when available, numpy otherwise.

The two backends expose the same five entry points and consume identical
primitive draws, so swapping them changes results only at rounding level:

    su_from_gaussian, ball_from_primitives, kernel_vw_batch,
    conv_kernel_batch, hyp2f1_series

Set ``WEYLCONV_BACKEND=python`` (or ``ext``) to override the automatic
choice; the compiled backend only covers ranks q <= 3, so larger ranks fall
back to numpy regardless.
"""

from __future__ import annotations

import os

from . import kernel as _py

try:
    from . import _kernel_ext as _ext
except ImportError:  # extension not built; pure numpy throughout
    _ext = None

_FORCED = os.environ.get("WEYLCONV_BACKEND", "").strip().lower()
if _FORCED not in ("", "ext", "python"):
    raise RuntimeError(f"WEYLCONV_BACKEND must be 'ext' or 'python', got {_FORCED!r}")
if _FORCED == "ext" and _ext is None:
    raise RuntimeError("WEYLCONV_BACKEND=ext but the compiled extension is not built")


def have_extension() -> bool:
    return _ext is not None


def get_backend(name: str | None = None):
    """Return the backend module by name ('ext'/'python'), or the active one."""
    if name is None:
        name = _FORCED or ("ext" if _ext is not None else "python")
    if name == "ext":
        if _ext is None:
            raise RuntimeError("compiled extension is not available")
        return _ext
    if name == "python":
        return _py
    raise ValueError(f"unknown backend {name!r}")


def active_name(q: int | None = None) -> str:
    b = get_backend()
    if b is _ext and q is not None and q > _ext.MAX_Q:
        return "python"
    return b.BACKEND_NAME


def _pick(q: int | None):
    b = get_backend()
    if b is not _py and q is not None and q > b.MAX_Q:
        return _py
    return b


def su_from_gaussian(g):
    return _pick(g.shape[-1]).su_from_gaussian(g)


def ball_from_primitives(dirs, radii):
    return _pick(dirs.shape[-1]).ball_from_primitives(dirs, radii)


def kernel_vw_batch(t, s, v, w):
    return _pick(v.shape[-1]).kernel_vw_batch(t, s, v, w)


def conv_kernel_batch(t, s, g, dirs, radii):
    return _pick(g.shape[-1]).conv_kernel_batch(t, s, g, dirs, radii)


def hyp2f1_series(a, b, c, x, tol=1e-15, max_terms=2_000_000):
    try:
        return get_backend().hyp2f1_series(a, b, c, x, tol, max_terms)
    except RuntimeError as exc:  # compiled backend reports a plain RuntimeError
        raise _py.ConvergenceError(str(exc)) from exc
