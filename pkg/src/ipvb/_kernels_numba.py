"""Numba-compiled decoder kernels (default backend).

Twin of _kernels_numpy: same function names, same signatures, same
arithmetic order (accumulate a segment sum, then subtract once), so the
two backends agree to the last bit on the instances we care about.
First call per process pays JIT compilation; cache=True persists the
compiled code next to the package.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U64_1 = np.uint64(1)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def tie_break_hash(seed, iteration, n):
    """Deterministic 64-bit hash of (seed, iteration, variable index)."""
    z = np.uint64(seed) + _GAMMA * (np.uint64(iteration) + _U64_1)
    z = _mix64(z)
    z = z + _GAMMA * (np.uint64(n) + _U64_1)
    return _mix64(z)


# ---------------------------------------------------------------------------
# interval-passing sweeps
# ---------------------------------------------------------------------------

@njit(cache=True)
def ip_check_pass(y, check_ptr, check_deg, check_var, l_v2c, u_v2c, l_c2v, u_c2v):
    for m in range(check_deg.size):
        a = check_ptr[m]
        b = check_ptr[m + 1]
        sum_u = 0.0
        sum_l = 0.0
        for e in range(a, b):
            sum_u += u_v2c[e]
            sum_l += l_v2c[e]
        ym = y[m]
        for e in range(a, b):
            lo = ym - (sum_u - u_v2c[e])
            l_c2v[e] = lo if lo > 0.0 else 0.0
            u_c2v[e] = ym - (sum_l - l_v2c[e])


@njit(cache=True)
def ip_var_pass(var_ptr, var_deg, var_eidx, l_c2v, u_c2v, l_v2c, u_v2c,
                var_l, var_u):
    delta = 0.0
    for n in range(var_deg.size):
        a = var_ptr[n]
        b = var_ptr[n + 1]
        e0 = var_eidx[a]
        lo = l_c2v[e0]
        hi = u_c2v[e0]
        for j in range(a + 1, b):
            e = var_eidx[j]
            if l_c2v[e] > lo:
                lo = l_c2v[e]
            if u_c2v[e] < hi:
                hi = u_c2v[e]
        var_l[n] = lo
        var_u[n] = hi
        for j in range(a, b):
            e = var_eidx[j]
            d = abs(l_v2c[e] - lo)
            if d > delta:
                delta = d
            d = abs(u_v2c[e] - hi)
            if d > delta:
                delta = d
            l_v2c[e] = lo
            u_v2c[e] = hi
    return delta


# ---------------------------------------------------------------------------
# verification state updates
# ---------------------------------------------------------------------------

@njit(cache=True)
def check_refresh(y, check_ptr, check_deg, check_var, status, xhat, eta, dct):
    for m in range(check_deg.size):
        acc = 0.0
        cnt = 0
        for e in range(check_ptr[m], check_ptr[m + 1]):
            n = check_var[e]
            if status[n] == 1:
                acc += xhat[n]
                cnt += 1
        eta[m] = y[m] - acc
        dct[m] = check_deg[m] - cnt


@njit(cache=True)
def vb_release(check_ptr, check_deg, check_var, status, xhat, xi):
    n_checks = check_deg.size
    any_flag = False
    for m in range(n_checks):
        if xi[m] == 1:
            any_flag = True
            break
    if not any_flag:
        return 0
    # phase 1: decide against the entry state, no writes yet
    release = np.zeros(status.size, dtype=np.uint8)
    fire = np.zeros(n_checks, dtype=np.uint8)
    for m in range(n_checks):
        if xi[m] != 1:
            continue
        hit = False
        for e in range(check_ptr[m], check_ptr[m + 1]):
            n = check_var[e]
            if status[n] == 0:
                release[n] = 1
                hit = True
        if hit:
            fire[m] = 1
    # phase 2: apply
    count = 0
    for n in range(status.size):
        if release[n] == 1:
            status[n] = 1
            xhat[n] = 0.0
            count += 1
    for m in range(n_checks):
        if fire[m] == 1:
            xi[m] = 0
    return count


@njit(cache=True)
def vb_rules(var_ptr, var_deg, var_check, var_check_pad, var_slot_mask,
             status, xhat, eta, dct, xi, tol, seed, iteration, use_coincidence):
    changes = 0
    for n in range(var_deg.size):
        if status[n] == 1:
            continue
        a = var_ptr[n]
        b = var_ptr[n + 1]
        # zero rule
        fired = False
        for j in range(a, b):
            if abs(eta[var_check[j]]) <= tol:
                status[n] = 1
                xhat[n] = 0.0
                changes += 1
                fired = True
                break
        if fired:
            continue
        # degree-1 rule, random choice among qualifying checks
        cnt = 0
        for j in range(a, b):
            if dct[var_check[j]] == 1:
                cnt += 1
        if cnt > 0:
            pick = np.int64(tie_break_hash(seed, iteration, n) % np.uint64(cnt))
            k = 0
            for j in range(a, b):
                if dct[var_check[j]] == 1:
                    if k == pick:
                        status[n] = 1
                        xhat[n] = eta[var_check[j]]
                        changes += 1
                        break
                    k += 1
            continue
        # coincidence rule
        if use_coincidence and status[n] == 0:
            marked = False
            for j in range(a, b):
                ej = eta[var_check[j]]
                if ej <= tol:
                    continue
                partner = False
                for j2 in range(a, b):
                    if j2 == j:
                        continue
                    e2 = eta[var_check[j2]]
                    if e2 > tol and abs(ej - e2) <= tol:
                        partner = True
                        break
                if partner:
                    if not marked:
                        status[n] = -1
                        changes += 1
                        marked = True
                    m = var_check[j]
                    if xi[m] == 0:
                        xi[m] = 1
                        changes += 1
    return changes


# ---------------------------------------------------------------------------
# combined interval/verification sweeps
# ---------------------------------------------------------------------------

@njit(cache=True)
def vbip_release(check_ptr, check_deg, check_var, var_ptr, var_deg, var_eidx,
                 status, xhat, xi, l_v2c, u_v2c, var_l, var_u,
                 released_var, released_check):
    released_var[:] = 0
    released_check[:] = 0
    n_checks = check_deg.size
    any_flag = False
    for m in range(n_checks):
        if xi[m] == 1:
            any_flag = True
            break
    if not any_flag:
        return 0
    for m in range(n_checks):
        if xi[m] != 1:
            continue
        hit = False
        for e in range(check_ptr[m], check_ptr[m + 1]):
            n = check_var[e]
            if status[n] == 0:
                released_var[n] = 1
                hit = True
        if hit:
            released_check[m] = 1
    count = 0
    for n in range(status.size):
        if released_var[n] == 1:
            status[n] = 1
            xhat[n] = 0.0
            var_l[n] = 0.0
            var_u[n] = 0.0
            for j in range(var_ptr[n], var_ptr[n + 1]):
                e = var_eidx[j]
                l_v2c[e] = 0.0
                u_v2c[e] = 0.0
            count += 1
    for m in range(n_checks):
        if released_check[m] == 1:
            xi[m] = 0
    return count


@njit(cache=True)
def zero_released_edges(check_ptr, check_deg, check_var, released_check,
                        released_var, l_c2v, u_c2v):
    for m in range(check_deg.size):
        if released_check[m] != 1:
            continue
        for e in range(check_ptr[m], check_ptr[m + 1]):
            if released_var[check_var[e]] == 1:
                l_c2v[e] = 0.0
                u_c2v[e] = 0.0


@njit(cache=True)
def vbip_var_pass(var_ptr, var_deg, var_eidx, var_check, var_check_pad,
                  var_slot_mask, status, xhat, eta, xi, l_c2v, u_c2v,
                  l_v2c, u_v2c, var_l, var_u, tol):
    delta = 0.0
    changes = 0
    for n in range(var_deg.size):
        if status[n] == 1:
            continue
        a = var_ptr[n]
        b = var_ptr[n + 1]
        e0 = var_eidx[a]
        lo = l_c2v[e0]
        hi = u_c2v[e0]
        for j in range(a + 1, b):
            e = var_eidx[j]
            if l_c2v[e] > lo:
                lo = l_c2v[e]
            if u_c2v[e] < hi:
                hi = u_c2v[e]
        var_l[n] = lo
        var_u[n] = hi
        for j in range(a, b):
            e = var_eidx[j]
            d = abs(l_v2c[e] - lo)
            if d > delta:
                delta = d
            d = abs(u_v2c[e] - hi)
            if d > delta:
                delta = d
            l_v2c[e] = lo
            u_v2c[e] = hi
        # coincidence rule first, closure second
        if status[n] == 0:
            marked = False
            for j in range(a, b):
                ej = eta[var_check[j]]
                if ej <= tol:
                    continue
                partner = False
                for j2 in range(a, b):
                    if j2 == j:
                        continue
                    e2 = eta[var_check[j2]]
                    if e2 > tol and abs(ej - e2) <= tol:
                        partner = True
                        break
                if partner:
                    if not marked:
                        status[n] = -1
                        changes += 1
                        marked = True
                    m = var_check[j]
                    if xi[m] == 0:
                        xi[m] = 1
                        changes += 1
        if hi - lo <= tol:
            status[n] = 1
            xhat[n] = lo
            changes += 1
            for j in range(a, b):
                e = var_eidx[j]
                l_v2c[e] = lo
                u_v2c[e] = lo
    return delta, changes
