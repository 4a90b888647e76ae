"""Random nonnegative sparse test signals and the recovery success test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SignalError",
    "SparseSignal",
    "generate_signal",
    "reconstruction_success",
    "write_signal",
    "parse_signal",
    "load_signal",
    "save_signal",
]


class SignalError(ValueError):
    """Invalid sparse-signal data."""


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """Length-N nonnegative vector stored as (support, values).

    Support indices are 0-based, distinct and kept sorted; every stored
    value is strictly positive.  Entries off the support are zero.
    """

    length: int
    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        length = int(self.length)
        support = np.asarray(self.support, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if length < 1:
            raise SignalError("signal length must be positive")
        if support.size != values.size:
            raise SignalError("support and values must have equal length")
        if support.size > length:
            raise SignalError("support size exceeds signal length")
        order = np.argsort(support, kind="stable")
        support = support[order]
        values = values[order]
        if support.size:
            if support[0] < 0 or support[-1] >= length:
                raise SignalError("support index out of range")
            if np.any(np.diff(support) == 0):
                raise SignalError("duplicate support index")
            if np.any(values <= 0):
                raise SignalError("support values must be strictly positive")
        support.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @property
    def support_size(self) -> int:
        return int(self.support.size)

    @property
    def sparsity(self) -> float:
        return self.support.size / self.length

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.length, dtype=np.float64)
        dense[self.support] = self.values
        return dense

    def __eq__(self, other):
        if not isinstance(other, SparseSignal):
            return NotImplemented
        return (self.length == other.length
                and np.array_equal(self.support, other.support)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        return f"SparseSignal(length={self.length}, support_size={self.support_size})"


# Nonzero values snap to multiples of 2**-40.  Measurement sums and every
# decoder message then stay exact in float64 (all are grid multiples far
# below 2**53 grid units), so interval bounds carry no rounding drift and
# residual ties are exact instead of epsilon-close.  The quantization
# perturbs each half-normal draw by at most 2**-41.
_VALUE_GRID_BITS = 40


def generate_signal(n_vars: int, support_size: int, seed) -> SparseSignal:
    """Uniform random support of the given size with half-normal values.

    Each nonzero entry is |g| for a standard normal draw g, rounded to the
    binary grid noted above.  Identical (n_vars, support_size, seed)
    produce an identical signal.
    """
    n_vars = int(n_vars)
    support_size = int(support_size)
    if support_size < 0 or support_size > n_vars:
        raise SignalError(
            f"support size {support_size} out of range [0, {n_vars}]"
        )
    rng = np.random.default_rng(seed)
    support = rng.choice(n_vars, size=support_size, replace=False)

    def draw(count):
        raw = np.abs(rng.standard_normal(count))
        return np.ldexp(np.round(np.ldexp(raw, _VALUE_GRID_BITS)), -_VALUE_GRID_BITS)

    values = draw(support_size)
    while np.any(values == 0):  # draws below half a grid step round to zero
        redo = values == 0
        values[redo] = draw(int(redo.sum()))
    return SparseSignal(n_vars, support, values)


def reconstruction_success(x_true, x_hat, tol: float = 1e-6) -> bool:
    """True iff max |x_hat - x_true| <= tol * max(1, max(x_true))."""
    truth = x_true.to_dense() if isinstance(x_true, SparseSignal) else np.asarray(
        x_true, dtype=np.float64)
    est = np.asarray(x_hat, dtype=np.float64)
    if truth.shape != est.shape:
        raise SignalError(
            f"length mismatch: {truth.size} true entries vs {est.size} estimates"
        )
    scale = max(1.0, float(truth.max(initial=0.0)))
    return bool(np.all(np.abs(est - truth) <= tol * scale))


# ---------------------------------------------------------------------------
# signal file format: "N K" then K lines of "index value" (1-based index)
# ---------------------------------------------------------------------------

def write_signal(signal: SparseSignal) -> str:
    lines = [f"{signal.length} {signal.support_size}"]
    for idx, val in zip(signal.support, signal.values):
        lines.append(f"{int(idx) + 1} {val:.17g}")
    return "\n".join(lines) + "\n"


def parse_signal(text) -> SparseSignal:
    if hasattr(text, "read"):
        text = text.read()
    lines = text.splitlines()
    if not lines:
        raise SignalError("line 1: empty signal file")
    header = lines[0].split()
    if len(header) != 2:
        raise SignalError("line 1: expected 'N K'")
    try:
        length, k = int(header[0]), int(header[1])
    except ValueError:
        raise SignalError("line 1: non-integer header") from None
    support = []
    values = []
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != k:
        raise SignalError(f"expected {k} entry lines, got {len(body)}")
    for i, ln in enumerate(body):
        toks = ln.split()
        if len(toks) != 2:
            raise SignalError(f"line {i + 2}: expected 'index value'")
        try:
            idx = int(toks[0])
            val = float(toks[1])
        except ValueError:
            raise SignalError(f"line {i + 2}: malformed entry") from None
        if idx < 1 or idx > length:
            raise SignalError(f"line {i + 2}: index {idx} out of range [1, {length}]")
        support.append(idx - 1)
        values.append(val)
    return SparseSignal(length, np.array(support, dtype=np.int64),
                        np.array(values, dtype=np.float64))


def load_signal(path) -> SparseSignal:
    with open(path, "r", encoding="ascii") as fh:
        return parse_signal(fh.read())


def save_signal(signal: SparseSignal, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(write_signal(signal))
