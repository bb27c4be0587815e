"""Pure numpy implementations of the hot kernels.

Signatures mirror ``_kernels.pyx`` exactly; :mod:`stakepower._backend` picks
one of the two at import time.
"""

import numpy as np

from .stochastic import reg_inc_beta_array


def pivot_counts(x, member, totals, quotas):
    """Swing tallies for sampled coalitions.

    ``member`` is an ``(R, n)`` 0/1 matrix of sampled memberships and
    ``totals`` its weighted row sums.  ``quotas`` must be sorted ascending.
    For every sample and agent the weight without the agent ``a`` and with it
    ``a + x_i`` are formed; the agent swings for every quota in ``(a, a + x_i]``.
    Returns an ``(n, Q)`` int64 array of counts.
    """
    x = np.asarray(x, dtype=np.float64)
    member = np.asarray(member, dtype=np.uint8)
    n = x.size
    q = np.asarray(quotas, dtype=np.float64)
    nq = q.size
    without = totals[:, None] - member * x[None, :]
    with_i = without + x[None, :]
    lo = np.searchsorted(q, without, side="right")
    hi = np.searchsorted(q, with_i, side="right")
    base = (np.arange(n) * (nq + 1))[None, :]
    size = n * (nq + 1)
    diff = np.bincount((base + lo).ravel(), minlength=size)
    diff -= np.bincount((base + hi).ravel(), minlength=size)
    diff = diff.reshape(n, nq + 1)
    return np.cumsum(diff[:, :nq], axis=1).astype(np.int64)


def _cdf_gap(lo, hi, width, a, b, lbeta, gl_x, gl_w):
    """``I_hi(a, b) - I_lo(a, b)`` without cancellation for narrow gaps.

    ``width`` is ``hi - lo`` computed by the caller without subtraction.
    """
    direct = reg_inc_beta_array(hi, a, b) - np.where(
        lo > 0, reg_inc_beta_array(np.maximum(lo, 0.0), a, b), 0.0
    )
    narrow = (lo > 0) & (width <= 0.1 * np.minimum(lo, 1.0 - hi))
    if not narrow.any():
        return direct
    lo_n, w_n = lo[narrow], width[narrow]
    a_n, b_n, lb_n = a[narrow], b[narrow], lbeta[narrow]
    t = lo_n[:, None] + 0.5 * w_n[:, None] * (gl_x[None, :] + 1.0)
    pdf = np.exp(
        (a_n[:, None] - 1.0) * np.log(t)
        + (b_n[:, None] - 1.0) * np.log1p(-t)
        - lb_n[:, None]
    )
    direct[narrow] = 0.5 * w_n * (pdf @ gl_w)
    return direct


def cond_banzhaf(c, theta, n, alpha, kw, ka, kb, klbeta, gl_x, gl_w):
    """Expected Banzhaf index of agent 1 given its weight ``c``.

    ``kw``, ``ka``, ``kb``, ``klbeta`` hold, for coalition sizes
    ``k = 1 .. n-2``, the size probability ``C(n-1, k) / 2^(n-1)``, the Beta
    parameters ``(k alpha, (n-1-k) alpha)`` and their log Beta function.
    """
    c = np.asarray(c, dtype=np.float64)
    out = np.empty_like(c)
    atom = 0.5 ** (n - 1)
    if theta <= 0.5:
        dictator = c >= 1.0 - theta
    else:
        dictator = c > theta
    out[dictator] = 1.0
    rest = ~dictator
    if not rest.any():
        return out
    cc = c[rest]
    hi = np.minimum(theta / (1.0 - cc), 1.0)
    lo = np.maximum((theta - cc) / (1.0 - cc), 0.0)
    width = cc / (1.0 - cc)
    shape = (cc.size, len(kw))
    A = np.broadcast_to(ka, shape)
    B = np.broadcast_to(kb, shape)
    LB = np.broadcast_to(klbeta, shape)
    if theta <= 0.5:
        gap = _cdf_gap(
            np.broadcast_to(lo[:, None], shape), np.broadcast_to(hi[:, None], shape),
            np.broadcast_to(width[:, None], shape), A, B, LB, gl_x, gl_w,
        )
        val = gap @ kw + np.where(cc > theta, atom, 0.0)
    else:
        middle = cc >= 1.0 - theta
        gap = _cdf_gap(
            np.broadcast_to(lo[:, None], shape),
            np.broadcast_to(np.where(middle, 1.0, hi)[:, None], shape),
            np.broadcast_to(np.where(middle, 1.0 - lo, width)[:, None], shape),
            A, B, LB, gl_x, gl_w,
        )
        val = gap @ kw + np.where(middle, atom, 0.0)
    out[rest] = np.clip(val, 0.0, 1.0)
    return out


def ibeta(h, a, b):
    return reg_inc_beta_array(h, a, b)
