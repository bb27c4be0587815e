"""Adaptive Simpson quadrature, refined breadth-first so the integrand is
always evaluated on whole batches of abscissae."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

MAX_ACTIVE = 1_000_000


@dataclass
class QuadInfo:
    evaluations: int = 0
    intervals: int = 0
    depth_limited: int = 0


def adaptive_simpson(f, a: float, b: float, abs_tol: float = 1e-9, max_depth: int = 50):
    """Integrate a vectorised ``f`` over ``[a, b]``.

    ``f`` maps an array of shape ``(m,)`` to ``(m,)`` or ``(m, d)``; vector
    valued integrands are refined until every component meets the local
    tolerance.  Each interval is accepted once the Richardson estimate
    ``|S_left + S_right - S| <= 15 tol`` holds, with ``tol`` halved at every
    split; intervals reaching ``max_depth`` are accepted as they are.

    Returns ``(value, info)``; ``value`` has shape ``()`` or ``(d,)``.
    """
    info = QuadInfo()
    if b <= a:
        probe = np.asarray(f(np.array([0.5 * (a + b)])))
        return np.zeros(probe.shape[1:]), info

    def call(x):
        info.evaluations += x.size
        return np.asarray(f(x), dtype=float)

    y = call(np.array([a, 0.5 * (a + b), b]))
    lo, hi = np.array([a]), np.array([b])
    flo, fmid, fhi = y[:1], y[1:2], y[2:]
    whole = (b - a) / 6.0 * (flo + 4.0 * fmid + fhi)
    tol = np.array([abs_tol])
    depth = 0
    total = np.zeros(y.shape[1:])

    while lo.size:
        mid = 0.5 * (lo + hi)
        ql, qr = 0.5 * (lo + mid), 0.5 * (mid + hi)
        fq = call(np.concatenate((ql, qr)))
        fl, fr = fq[: lo.size], fq[lo.size :]
        h = (hi - lo)[(...,) + (None,) * (y.ndim - 1)]
        left = h / 12.0 * (flo + 4.0 * fl + fmid)
        right = h / 12.0 * (fmid + 4.0 * fr + fhi)
        err = left + right - whole
        err_max = np.abs(err).reshape(lo.size, -1).max(axis=1)
        depth += 1
        done = err_max <= 15.0 * tol
        if depth >= max_depth:
            info.depth_limited += int((~done).sum())
            done[:] = True
        info.intervals += int(done.sum())
        total = total + (left[done] + right[done] + err[done] / 15.0).sum(axis=0)
        keep = ~done
        if not keep.any():
            break
        if 2 * keep.sum() > MAX_ACTIVE:
            raise NumericalError(
                f"adaptive quadrature on [{a}, {b}] needs more than {MAX_ACTIVE} "
                "active intervals; the integrand is likely discontinuous or noisy"
            )
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, fl, fmid, fr, fhi = flo[keep], fl[keep], fmid[keep], fr[keep], fhi[keep]
        left, right, tol = left[keep], right[keep], tol[keep] / 2.0
        lo = np.concatenate((lo, mid))
        hi = np.concatenate((mid, hi))
        new_flo = np.concatenate((flo, fmid))
        new_fhi = np.concatenate((fmid, fhi))
        fmid = np.concatenate((fl, fr))
        flo, fhi = new_flo, new_fhi
        whole = np.concatenate((left, right))
        tol = np.concatenate((tol, tol))
    return total, info

