"""Iterative reconstruction engines for nonnegative sparse signals.

Three decoders share one synchronized schedule (one check-node sweep then
one variable-node sweep per iteration) so their per-iteration recovered
sets are directly comparable:

* ``decode_ip``   -- interval passing: per-edge lower/upper bounds that
  tighten monotonically; a variable is recovered when its interval closes.
* ``decode_vb``   -- node-based verification: zero-residual, degree-1 and
  identical-residual (coincidence) rules progressively verify variables.
* ``decode_vbip`` -- the combined engine: interval messages plus the
  residual/coincidence machinery; per iteration it recovers a superset of
  what either parent recovers.

Real-number equality tests (residual matching, zero residuals, interval
closure, fixed-point detection) use the absolute threshold
``eps * max(1, |y|_inf)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import get_backend
from .graph import SensingMatrix

__all__ = [
    "DecodeError",
    "EPS_EQ_DEFAULT",
    "MAX_ITER_DEFAULT",
    "IpMessages",
    "VerificationState",
    "DecodeResult",
    "ip_check_update",
    "ip_variable_update",
    "vb_check_update",
    "vb_variable_update",
    "decode_ip",
    "decode_vb",
    "decode_vbip",
    "decode",
]

EPS_EQ_DEFAULT = 1e-9
MAX_ITER_DEFAULT = 50


class DecodeError(ValueError):
    """Invalid decoder input."""


def _checked_measurements(matrix: SensingMatrix, y) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape != (matrix.n_checks,):
        raise DecodeError(
            f"measurement vector has length {y.size}, expected {matrix.n_checks}"
        )
    if np.any(y < 0):
        raise DecodeError("measurement entries must be nonnegative")
    return y


def _tolerance(y: np.ndarray, eps: float) -> float:
    return eps * max(1.0, float(y.max(initial=0.0)))


def _seed64(seed) -> np.uint64:
    return np.uint64(int(seed) % (1 << 64))


@dataclass
class IpMessages:
    """Interval messages on the edges of a sensing graph.

    Edge arrays are check-major (see SensingMatrix); ``*_to_check`` hold
    the variable-to-check direction, ``*_to_var`` the check-to-variable
    direction, and ``var_lower``/``var_upper`` the per-variable
    aggregates L_n, U_n.
    """

    lower_to_check: np.ndarray
    upper_to_check: np.ndarray
    lower_to_var: np.ndarray
    upper_to_var: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray

    @classmethod
    def initial(cls, matrix: SensingMatrix, y: np.ndarray) -> "IpMessages":
        """Start state: lower messages 0, upper messages y_m on every edge of m."""
        n_edges = matrix.n_edges
        return cls(
            lower_to_check=np.zeros(n_edges),
            upper_to_check=np.repeat(y, matrix.check_deg).astype(np.float64),
            lower_to_var=np.zeros(n_edges),
            upper_to_var=np.zeros(n_edges),
            var_lower=np.zeros(matrix.n_vars),
            var_upper=np.full(matrix.n_vars, np.inf),
        )


@dataclass
class VerificationState:
    """Node state of the verification decoders.

    ``status`` is -1 for coincidence-marked, 0 for unverified, 1 for
    verified; ``estimate`` is meaningful where status is 1 and never
    changes once set.  ``residual``/``unresolved_degree`` stay consistent
    with the variable state at iteration boundaries.  ``measurements``
    keeps the decoded vector y and ``scale`` the equality-test scale
    max(1, |y|_inf), both fixed at initialization.
    """

    status: np.ndarray
    estimate: np.ndarray
    residual: np.ndarray
    unresolved_degree: np.ndarray
    coincidence_flag: np.ndarray
    measurements: np.ndarray
    scale: float

    @classmethod
    def initial(cls, matrix: SensingMatrix, y) -> "VerificationState":
        y = _checked_measurements(matrix, y)
        return cls(
            status=np.zeros(matrix.n_vars, dtype=np.int8),
            estimate=np.zeros(matrix.n_vars),
            residual=y.copy(),
            unresolved_degree=matrix.check_deg.astype(np.int32).copy(),
            coincidence_flag=np.zeros(matrix.n_checks, dtype=np.uint8),
            measurements=y,
            scale=max(1.0, float(y.max(initial=0.0))),
        )

    @property
    def verified(self) -> np.ndarray:
        return self.status == 1


@dataclass
class DecodeResult:
    """Outcome of one decode call.

    ``verified_history[l - 1]`` is the recovered set after iteration l: the
    verified variables for the verification decoders, the closed intervals
    for interval passing.  ``max_widths`` is the largest interval width per
    iteration (NaN for the pure verification decoder) and ``flag_counts``
    the number of raised coincidence flags per iteration (0 for interval
    passing).  ``lower_history``/``upper_history`` hold per-iteration
    bound snapshots when interval recording was requested.
    """

    estimate: np.ndarray
    converged: bool
    iterations: int
    verified_history: np.ndarray
    max_widths: np.ndarray
    flag_counts: np.ndarray
    lower_history: np.ndarray | None = None
    upper_history: np.ndarray | None = None

    @property
    def verified_counts(self) -> np.ndarray:
        return self.verified_history.sum(axis=1)

    def trace_lines(self) -> list[str]:
        """Per-iteration debug lines: iteration, recovered count, max width, flags."""
        counts = self.verified_counts
        return [
            f"{l + 1} {int(counts[l])} {self.max_widths[l]:.9g} {int(self.flag_counts[l])}"
            for l in range(self.iterations)
        ]


def _stack_history(rows: list[np.ndarray], n_vars: int, dtype) -> np.ndarray:
    if not rows:
        return np.zeros((0, n_vars), dtype=dtype)
    return np.array(rows, dtype=dtype)


# ---------------------------------------------------------------------------
# single-node update rules (reference form of the kernel sweeps)
# ---------------------------------------------------------------------------

def ip_check_update(y_m: float, lower_in, upper_in):
    """Interval messages leaving one check node.

    ``lower_in``/``upper_in`` are the incoming per-edge bounds from the
    check's neighbors.  The outgoing lower bound to each neighbor is
    max(0, y_m - sum of the other upper bounds); the outgoing upper bound
    is y_m minus the sum of the other lower bounds.
    """
    lower_in = np.asarray(lower_in, dtype=np.float64)
    upper_in = np.asarray(upper_in, dtype=np.float64)
    sum_u = upper_in.sum()
    sum_l = lower_in.sum()
    lower_out = np.maximum(y_m - (sum_u - upper_in), 0.0)
    upper_out = y_m - (sum_l - lower_in)
    return lower_out, upper_out


def ip_variable_update(lower_in, upper_in):
    """Aggregate bounds at one variable node.

    Returns (L_n, U_n) = (max of incoming lower, min of incoming upper);
    every outgoing edge carries this same pair.
    """
    lower_in = np.asarray(lower_in, dtype=np.float64)
    upper_in = np.asarray(upper_in, dtype=np.float64)
    if lower_in.size == 0:
        raise DecodeError("variable update needs at least one incoming message")
    return float(lower_in.max()), float(upper_in.min())


def vb_check_update(state: VerificationState, matrix: SensingMatrix, y=None) -> VerificationState:
    """Check sweep of the verification decoder (in place).

    Every flagged check zero-verifies its unverified unmarked neighbors
    (against the state at entry) and drops its flag; residuals and
    unresolved degrees are then recomputed.  A marked variable is never
    zeroed here; it is recovered later by the degree-1 rule.  ``y``
    defaults to the measurements the state was initialized with.
    """
    y = state.measurements if y is None else _checked_measurements(matrix, y)
    kern = get_backend()
    kern.vb_release(matrix.check_ptr, matrix.check_deg, matrix.check_var,
                    state.status, state.estimate, state.coincidence_flag)
    kern.check_refresh(y, matrix.check_ptr, matrix.check_deg, matrix.check_var,
                       state.status, state.estimate, state.residual,
                       state.unresolved_degree)
    return state


def vb_variable_update(state: VerificationState, matrix: SensingMatrix, *,
                       seed=0, iteration: int = 0, eps: float = EPS_EQ_DEFAULT,
                       coincidence: bool = True) -> VerificationState:
    """Variable sweep of the verification decoder (in place).

    Rule order per variable: zero-residual rule, then degree-1 rule, then
    the coincidence rule (the latter only for unmarked variables, and only
    on residuals strictly above the threshold).  Ties in the degree-1 rule
    pick a uniformly hashed element of the qualifying check set, keyed by
    (seed, iteration, variable), so runs are reproducible and independent
    of visiting order.  Residuals and unresolved degrees are refreshed
    afterwards so the state stays consistent at iteration boundaries.
    """
    tol = eps * state.scale
    kern = get_backend()
    kern.vb_rules(matrix.var_ptr, matrix.var_deg, matrix.var_check,
                  matrix.var_check_pad, matrix.var_slot_mask,
                  state.status, state.estimate, state.residual,
                  state.unresolved_degree, state.coincidence_flag,
                  tol, _seed64(seed), np.uint64(int(iteration)),
                  bool(coincidence))
    kern.check_refresh(state.measurements, matrix.check_ptr, matrix.check_deg,
                       matrix.check_var, state.status, state.estimate,
                       state.residual, state.unresolved_degree)
    return state


def decode_ip(matrix: SensingMatrix, y, max_iter: int = MAX_ITER_DEFAULT,
              eps: float = EPS_EQ_DEFAULT, record_intervals: bool = False) -> DecodeResult:
    """Interval-passing reconstruction.

    Runs until every interval closes (width at most eps * max(1, |y|_inf)),
    a fixed point is reached (no message moved more than the threshold), or
    max_iter.  The estimate is the per-variable lower bound.
    """
    y = _checked_measurements(matrix, y)
    tol = _tolerance(y, eps)
    kern = get_backend()
    msgs = IpMessages.initial(matrix, y)
    history: list[np.ndarray] = []
    widths: list[float] = []
    lows: list[np.ndarray] = []
    ups: list[np.ndarray] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        kern.ip_check_pass(y, matrix.check_ptr, matrix.check_deg, matrix.check_var,
                           msgs.lower_to_check, msgs.upper_to_check,
                           msgs.lower_to_var, msgs.upper_to_var)
        delta = kern.ip_var_pass(matrix.var_ptr, matrix.var_deg, matrix.var_eidx,
                                 msgs.lower_to_var, msgs.upper_to_var,
                                 msgs.lower_to_check, msgs.upper_to_check,
                                 msgs.var_lower, msgs.var_upper)
        width = msgs.var_upper - msgs.var_lower
        closed = width <= tol
        history.append(closed)
        widths.append(float(width.max()))
        if record_intervals:
            lows.append(msgs.var_lower.copy())
            ups.append(msgs.var_upper.copy())
        if bool(closed.all()):
            converged = True
            break
        if delta <= tol:
            break
    if max_iter < 1:
        iterations = 0
    n_iter = len(history)
    return DecodeResult(
        estimate=msgs.var_lower.copy(),
        converged=converged,
        iterations=iterations,
        verified_history=_stack_history(history, matrix.n_vars, bool),
        max_widths=np.asarray(widths, dtype=np.float64),
        flag_counts=np.zeros(n_iter, dtype=np.int64),
        lower_history=_stack_history(lows, matrix.n_vars, np.float64) if record_intervals else None,
        upper_history=_stack_history(ups, matrix.n_vars, np.float64) if record_intervals else None,
    )


def decode_vb(matrix: SensingMatrix, y, max_iter: int = MAX_ITER_DEFAULT,
              eps: float = EPS_EQ_DEFAULT, seed=0,
              coincidence: bool = True) -> DecodeResult:
    """Node-based verification reconstruction.

    Converges exactly when every variable is verified; an iteration that
    changes nothing terminates the run early.  ``coincidence=False``
    disables the identical-residual rule (zero and degree-1 rules only).
    """
    y = _checked_measurements(matrix, y)
    kern = get_backend()
    state = VerificationState.initial(matrix, y)
    tol = state.scale * eps
    seed_u = _seed64(seed)
    history: list[np.ndarray] = []
    flags: list[int] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        changes = kern.vb_release(matrix.check_ptr, matrix.check_deg,
                                  matrix.check_var, state.status,
                                  state.estimate, state.coincidence_flag)
        kern.check_refresh(y, matrix.check_ptr, matrix.check_deg, matrix.check_var,
                           state.status, state.estimate, state.residual,
                           state.unresolved_degree)
        changes += kern.vb_rules(matrix.var_ptr, matrix.var_deg, matrix.var_check,
                                 matrix.var_check_pad, matrix.var_slot_mask,
                                 state.status, state.estimate, state.residual,
                                 state.unresolved_degree, state.coincidence_flag,
                                 tol, seed_u, np.uint64(iterations),
                                 bool(coincidence))
        kern.check_refresh(y, matrix.check_ptr, matrix.check_deg, matrix.check_var,
                           state.status, state.estimate, state.residual,
                           state.unresolved_degree)
        verified = state.verified
        history.append(verified.copy())
        flags.append(int(state.coincidence_flag.sum()))
        if bool(verified.all()):
            converged = True
            break
        if changes == 0:
            break
    if max_iter < 1:
        iterations = 0
    n_iter = len(history)
    return DecodeResult(
        estimate=state.estimate.copy(),
        converged=converged,
        iterations=iterations,
        verified_history=_stack_history(history, matrix.n_vars, bool),
        max_widths=np.full(n_iter, np.nan),
        flag_counts=np.asarray(flags, dtype=np.int64),
    )


def decode_vbip(matrix: SensingMatrix, y, max_iter: int = MAX_ITER_DEFAULT,
                eps: float = EPS_EQ_DEFAULT, seed=0,
                record_intervals: bool = False) -> DecodeResult:
    """Combined interval-passing / verification reconstruction.

    Carries the full interval messages plus per-check residuals and
    coincidence flags.  The check sweep releases flagged checks first
    (pinning the released variables' outgoing bounds to zero) so the same
    sweep's interval messages already reflect them; the variable sweep
    aggregates bounds, applies the coincidence rule, then verifies any
    variable whose interval has closed at its lower bound.  Verified
    variables keep their outgoing messages pinned at the verified value.
    ``seed`` is accepted for interface parity with the other decoders;
    this engine has no randomized rule.
    """
    del seed  # no randomized tie-break in this engine
    y = _checked_measurements(matrix, y)
    tol = _tolerance(y, eps)
    kern = get_backend()
    msgs = IpMessages.initial(matrix, y)
    state = VerificationState.initial(matrix, y)
    released_var = np.zeros(matrix.n_vars, dtype=np.uint8)
    released_check = np.zeros(matrix.n_checks, dtype=np.uint8)
    history: list[np.ndarray] = []
    widths: list[float] = []
    flags: list[int] = []
    lows: list[np.ndarray] = []
    ups: list[np.ndarray] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        n_released = kern.vbip_release(
            matrix.check_ptr, matrix.check_deg, matrix.check_var,
            matrix.var_ptr, matrix.var_deg, matrix.var_eidx,
            state.status, state.estimate, state.coincidence_flag,
            msgs.lower_to_check, msgs.upper_to_check,
            msgs.var_lower, msgs.var_upper, released_var, released_check)
        kern.ip_check_pass(y, matrix.check_ptr, matrix.check_deg, matrix.check_var,
                           msgs.lower_to_check, msgs.upper_to_check,
                           msgs.lower_to_var, msgs.upper_to_var)
        if n_released:
            kern.zero_released_edges(matrix.check_ptr, matrix.check_deg,
                                     matrix.check_var, released_check,
                                     released_var, msgs.lower_to_var,
                                     msgs.upper_to_var)
        kern.check_refresh(y, matrix.check_ptr, matrix.check_deg, matrix.check_var,
                           state.status, state.estimate, state.residual,
                           state.unresolved_degree)
        delta, changes = kern.vbip_var_pass(
            matrix.var_ptr, matrix.var_deg, matrix.var_eidx, matrix.var_check,
            matrix.var_check_pad, matrix.var_slot_mask,
            state.status, state.estimate, state.residual,
            state.coincidence_flag, msgs.lower_to_var, msgs.upper_to_var,
            msgs.lower_to_check, msgs.upper_to_check,
            msgs.var_lower, msgs.var_upper, tol)
        kern.check_refresh(y, matrix.check_ptr, matrix.check_deg, matrix.check_var,
                           state.status, state.estimate, state.residual,
                           state.unresolved_degree)
        verified = state.verified
        history.append(verified.copy())
        widths.append(float((msgs.var_upper - msgs.var_lower).max()))
        flags.append(int(state.coincidence_flag.sum()))
        if record_intervals:
            lows.append(msgs.var_lower.copy())
            ups.append(msgs.var_upper.copy())
        if bool(verified.all()):
            converged = True
            break
        if n_released == 0 and changes == 0 and delta <= tol:
            break
    if max_iter < 1:
        iterations = 0
    return DecodeResult(
        estimate=np.where(state.verified, state.estimate, msgs.var_lower),
        converged=converged,
        iterations=iterations,
        verified_history=_stack_history(history, matrix.n_vars, bool),
        max_widths=np.asarray(widths, dtype=np.float64),
        flag_counts=np.asarray(flags, dtype=np.int64),
        lower_history=_stack_history(lows, matrix.n_vars, np.float64) if record_intervals else None,
        upper_history=_stack_history(ups, matrix.n_vars, np.float64) if record_intervals else None,
    )


DECODERS = {
    "ip": decode_ip,
    "vb": decode_vb,
    "vbip": decode_vbip,
}


def decode(algorithm: str, matrix: SensingMatrix, y, max_iter: int = MAX_ITER_DEFAULT,
           eps: float = EPS_EQ_DEFAULT, seed=0, **kwargs) -> DecodeResult:
    """Dispatch to one of the decoders by name ('ip', 'vb' or 'vbip')."""
    try:
        fn = DECODERS[algorithm]
    except KeyError:
        raise DecodeError(f"unknown algorithm {algorithm!r}; expected one of "
                          f"{sorted(DECODERS)}") from None
    if algorithm == "ip":
        return fn(matrix, y, max_iter=max_iter, eps=eps, **kwargs)
    return fn(matrix, y, max_iter=max_iter, eps=eps, seed=seed, **kwargs)
