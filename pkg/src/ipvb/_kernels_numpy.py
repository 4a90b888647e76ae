"""Pure-numpy decoder kernels (fallback backend).

Mirrors _kernels_numba operation for operation.  Segment reductions use
ufunc.reduceat so summation order matches the sequential numba loops; the
degree-1 tie-break uses the same splitmix64 hash in both backends.

All kernels take flat edge-indexed arrays in check-major order (see
SensingMatrix) plus the variable-major index view, and mutate their state
arrays in place.  Tolerances arrive already scaled by max(1, |y|_inf).
"""

from __future__ import annotations

import numpy as np

_U64 = np.uint64
_GAMMA = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)


def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


def tie_break_hash(seed, iteration, n):
    """Deterministic 64-bit hash of (seed, iteration, variable index)."""
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        z = _U64(seed) + _GAMMA * (_U64(iteration) + _U64(1))
        z = _mix64(z)
        z = z + _GAMMA * (np.asarray(n).astype(_U64) + _U64(1))
        return _mix64(z)


# ---------------------------------------------------------------------------
# interval-passing sweeps
# ---------------------------------------------------------------------------

def ip_check_pass(y, check_ptr, check_deg, check_var, l_v2c, u_v2c, l_c2v, u_c2v):
    """Check-to-variable bounds; exclusion sums via total minus own message."""
    starts = check_ptr[:-1]
    sum_u = np.add.reduceat(u_v2c, starts)
    sum_l = np.add.reduceat(l_v2c, starts)
    y_e = np.repeat(y, check_deg)
    np.maximum(y_e - (np.repeat(sum_u, check_deg) - u_v2c), 0.0, out=l_c2v)
    np.subtract(y_e, np.repeat(sum_l, check_deg) - l_v2c, out=u_c2v)


def ip_var_pass(var_ptr, var_deg, var_eidx, l_c2v, u_c2v, l_v2c, u_v2c,
                var_l, var_u):
    """Aggregate incoming bounds per variable; returns the largest message change."""
    starts = var_ptr[:-1]
    var_l[:] = np.maximum.reduceat(l_c2v[var_eidx], starts)
    var_u[:] = np.minimum.reduceat(u_c2v[var_eidx], starts)
    lo_e = np.repeat(var_l, var_deg)
    hi_e = np.repeat(var_u, var_deg)
    old_l = l_v2c[var_eidx]
    old_u = u_v2c[var_eidx]
    delta = max(float(np.abs(old_l - lo_e).max(initial=0.0)),
                float(np.abs(old_u - hi_e).max(initial=0.0)))
    l_v2c[var_eidx] = lo_e
    u_v2c[var_eidx] = hi_e
    return delta


# ---------------------------------------------------------------------------
# verification state updates
# ---------------------------------------------------------------------------

def check_refresh(y, check_ptr, check_deg, check_var, status, xhat, eta, dct):
    """Recompute residuals and unresolved degrees from the variable state."""
    starts = check_ptr[:-1]
    verified_e = status[check_var] == 1
    contrib = np.where(verified_e, xhat[check_var], 0.0)
    eta[:] = y - np.add.reduceat(contrib, starts)
    dct[:] = check_deg - np.add.reduceat(verified_e.astype(np.int32), starts)


def vb_release(check_ptr, check_deg, check_var, status, xhat, xi):
    """Zero-verify the unmarked unverified neighbors of every flagged check.

    Snapshot semantics: all flagged checks release against the state at
    entry.  A flagged check with no releasable neighbor keeps its flag.
    Returns the number of variables released.
    """
    flagged = xi == 1
    if not flagged.any():
        return 0
    hit_e = np.repeat(flagged, check_deg) & (status[check_var] == 0)
    fire = np.logical_or.reduceat(hit_e, check_ptr[:-1]) & flagged
    if not fire.any():
        return 0
    released = np.zeros(status.size, dtype=bool)
    released[check_var[hit_e]] = True
    status[released] = 1
    xhat[released] = 0.0
    xi[fire] = 0
    return int(np.count_nonzero(released))


def _coincidence(status, eta, xi, var_check_pad, var_slot_mask, tol):
    """Mark variables seeing >= 2 equal positive residuals; flag those checks.

    Only unmarked unverified variables (status 0) are eligible.  A slot
    qualifies when some other incident slot carries an equal residual
    (within tol), both strictly above tol.  Returns state changes made.
    """
    eligible = status == 0
    if not eligible.any():
        return 0
    eta_p = np.where(var_slot_mask, eta[var_check_pad], np.nan)
    positive = var_slot_mask & (eta_p > tol)
    if np.count_nonzero(positive) < 2:
        return 0
    pair = (np.abs(eta_p[:, :, None] - eta_p[:, None, :]) <= tol)
    pair &= positive[:, :, None] & positive[:, None, :]
    pair &= ~np.eye(var_slot_mask.shape[1], dtype=bool)[None, :, :]
    slot_q = pair.any(axis=2)
    mark = eligible & slot_q.any(axis=1)
    if not mark.any():
        return 0
    status[mark] = -1
    targets = np.unique(var_check_pad[slot_q & mark[:, None]])
    new_flags = int(np.count_nonzero(xi[targets] == 0))
    xi[targets] = 1
    return int(np.count_nonzero(mark)) + new_flags


def vb_rules(var_ptr, var_deg, var_check, var_check_pad, var_slot_mask,
             status, xhat, eta, dct, xi, tol, seed, iteration, use_coincidence):
    """One variable sweep: zero rule, then degree-1 rule, then coincidence.

    Check-side quantities stay frozen during the sweep, so the outcome is
    independent of visiting order.  Returns state changes made.
    """
    starts = var_ptr[:-1]
    unverified = status != 1
    eta_e = eta[var_check]
    zero_e = np.abs(eta_e) <= tol
    fire_zero = unverified & np.logical_or.reduceat(zero_e, starts)

    d1_e = dct[var_check] == 1
    n_d1 = np.add.reduceat(d1_e.astype(np.int64), starts)
    fire_d1 = unverified & ~fire_zero & (n_d1 > 0)

    changes = 0
    if fire_zero.any():
        status[fire_zero] = 1
        xhat[fire_zero] = 0.0
        changes += int(np.count_nonzero(fire_zero))
    if fire_d1.any():
        owner_e = np.repeat(np.arange(var_deg.size), var_deg)
        cums = np.cumsum(d1_e.astype(np.int64))
        seg_base = cums[starts] - d1_e[starts]
        rank = cums - np.repeat(seg_base, var_deg)
        idx = np.flatnonzero(fire_d1)
        picks = (tie_break_hash(seed, iteration, idx)
                 % n_d1[idx].astype(np.uint64)).astype(np.int64)
        want = np.zeros(var_deg.size, dtype=np.int64)
        want[idx] = picks + 1
        chosen = d1_e & fire_d1[owner_e] & (rank == want[owner_e])
        status[owner_e[chosen]] = 1
        xhat[owner_e[chosen]] = eta_e[chosen]
        changes += int(idx.size)
    if use_coincidence:
        changes += _coincidence(status, eta, xi, var_check_pad, var_slot_mask, tol)
    return changes


# ---------------------------------------------------------------------------
# combined interval/verification sweeps
# ---------------------------------------------------------------------------

def vbip_release(check_ptr, check_deg, check_var, var_ptr, var_deg, var_eidx,
                 status, xhat, xi, l_v2c, u_v2c, var_l, var_u,
                 released_var, released_check):
    """Release pass for the combined decoder.

    Like vb_release, but released variables also get their outgoing
    interval messages and per-variable bounds pinned to zero.  The
    scratch masks record what was released for the later edge zeroing.
    """
    released_var[:] = 0
    released_check[:] = 0
    flagged = xi == 1
    if not flagged.any():
        return 0
    hit_e = np.repeat(flagged, check_deg) & (status[check_var] == 0)
    fire = np.logical_or.reduceat(hit_e, check_ptr[:-1]) & flagged
    if not fire.any():
        return 0
    released = np.zeros(status.size, dtype=bool)
    released[check_var[hit_e]] = True
    released_var[released] = 1
    released_check[fire] = 1
    status[released] = 1
    xhat[released] = 0.0
    var_l[released] = 0.0
    var_u[released] = 0.0
    xi[fire] = 0
    owner_e = np.repeat(np.arange(var_deg.size), var_deg)
    pin = var_eidx[released[owner_e]]
    l_v2c[pin] = 0.0
    u_v2c[pin] = 0.0
    return int(np.count_nonzero(released))


def zero_released_edges(check_ptr, check_deg, check_var, released_check,
                        released_var, l_c2v, u_c2v):
    """Force zero bounds on the edges from releasing checks to released variables."""
    mask = np.repeat(released_check.astype(bool), check_deg)
    mask &= released_var[check_var].astype(bool)
    l_c2v[mask] = 0.0
    u_c2v[mask] = 0.0


def vbip_var_pass(var_ptr, var_deg, var_eidx, var_check, var_check_pad,
                  var_slot_mask, status, xhat, eta, xi, l_c2v, u_c2v,
                  l_v2c, u_v2c, var_l, var_u, tol):
    """Variable sweep of the combined decoder.

    Unverified variables aggregate bounds and rebroadcast them, then the
    coincidence rule runs, then any variable whose interval has closed is
    verified at its lower bound and its outgoing messages are pinned.
    Returns (largest message change, state changes made).
    """
    starts = var_ptr[:-1]
    unverified = status != 1
    lo = np.maximum.reduceat(l_c2v[var_eidx], starts)
    hi = np.minimum.reduceat(u_c2v[var_eidx], starts)
    var_l[unverified] = lo[unverified]
    var_u[unverified] = hi[unverified]

    owner_e = np.repeat(np.arange(var_deg.size), var_deg)
    live_e = unverified[owner_e]
    eids = var_eidx[live_e]
    new_l = np.repeat(lo, var_deg)[live_e]
    new_u = np.repeat(hi, var_deg)[live_e]
    delta = max(float(np.abs(l_v2c[eids] - new_l).max(initial=0.0)),
                float(np.abs(u_v2c[eids] - new_u).max(initial=0.0)))
    l_v2c[eids] = new_l
    u_v2c[eids] = new_u

    changes = _coincidence(status, eta, xi, var_check_pad, var_slot_mask, tol)

    close = unverified & (hi - lo <= tol)
    if close.any():
        status[close] = 1
        xhat[close] = lo[close]
        pin_e = close[owner_e]
        pinned = np.repeat(lo, var_deg)[pin_e]
        l_v2c[var_eidx[pin_e]] = pinned
        u_v2c[var_eidx[pin_e]] = pinned
        changes += int(np.count_nonzero(close))
    return delta, changes
