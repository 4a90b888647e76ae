"""Monte Carlo success-probability sweeps and result persistence.

A sweep runs, for each sparsity level, a stream of random trials shared by
all requested algorithms (the instance at trial index i depends only on
the master seed and i, never on the algorithm list).  Per (level,
algorithm) point, trials accumulate until the failure quota is met or the
trial cap is reached.  Results serialize to a line-oriented CSV table and
an optional hand-rendered SVG plot; both are byte-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoders import EPS_EQ_DEFAULT, MAX_ITER_DEFAULT, decode
from .graph import SensingMatrix, measure
from .signals import SparseSignal, generate_signal, reconstruction_success

__all__ = [
    "SweepConfig",
    "SweepPoint",
    "ALGORITHMS",
    "trial_seed",
    "trial_instance",
    "run_trial",
    "sweep",
    "format_results",
    "parse_results",
    "emit_results",
    "render_plot_svg",
    "write_plot",
    "RESULT_COLUMNS",
]

ALGORITHMS = ("ip", "vb", "vbip")

RESULT_COLUMNS = ("algorithm", "k", "K", "N", "M", "trials", "successes",
                  "failures", "p_success", "master_seed")


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one Monte Carlo sweep.

    ``k_values`` are sparsity levels in (0, 1]; the support size at each
    level is round(k * N).  Per point, trials stop once failures reach
    ``min_failures`` or trials reach ``max_trials`` (the cap covers levels
    where nearly every trial succeeds).
    """

    matrix: SensingMatrix
    k_values: tuple[float, ...]
    algorithms: tuple[str, ...] = ALGORITHMS
    max_iter: int = MAX_ITER_DEFAULT
    min_failures: int = 100
    max_trials: int = 1_000_000
    seed: int = 0
    success_tol: float = 1e-6
    eps: float = EPS_EQ_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(float(k) for k in self.k_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.k_values:
            raise ValueError("at least one sparsity level is required")
        for k in self.k_values:
            if not 0.0 < k <= 1.0:
                raise ValueError(f"sparsity level {k} outside (0, 1]")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if self.min_failures < 1:
            raise ValueError("min_failures must be at least 1")
        if self.max_trials < self.min_failures:
            raise ValueError("max_trials must be at least min_failures")


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated outcome of one (algorithm, sparsity level) cell."""

    algorithm: str
    k: float
    K: int
    n_vars: int
    n_checks: int
    trials: int
    successes: int
    failures: int
    p_success: float
    master_seed: int


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Counter-based per-trial seed: independent of execution order."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_instance(matrix: SensingMatrix, support_size: int,
                   seed: int) -> tuple[SparseSignal, np.ndarray, int]:
    """Signal, measurements and the shared decoder seed for one trial."""
    sig_seed, dec_seed = (
        int(v) for v in np.random.SeedSequence(int(seed)).generate_state(
            2, dtype=np.uint64)
    )
    signal = generate_signal(matrix.n_vars, support_size, sig_seed)
    return signal, measure(matrix, signal), dec_seed


def run_trial(matrix: SensingMatrix, support_size: int, algorithms,
              seed: int, *, max_iter: int = MAX_ITER_DEFAULT,
              success_tol: float = 1e-6, eps: float = EPS_EQ_DEFAULT):
    """Decode one shared random instance with every requested algorithm.

    The signal and measurements are generated once from the trial seed and
    every decoder runs with the same derived seed (common random numbers).
    Returns {algorithm: (DecodeResult, success flag)}.
    """
    signal, y, dec_seed = trial_instance(matrix, support_size, seed)
    out = {}
    for algo in algorithms:
        result = decode(algo, matrix, y, max_iter=max_iter, eps=eps, seed=dec_seed)
        out[algo] = (result, reconstruction_success(signal, result.estimate,
                                                    success_tol))
    return out


def sweep(config: SweepConfig) -> list[SweepPoint]:
    """Run the Monte Carlo sweep; fully deterministic in the config."""
    matrix = config.matrix
    points: list[SweepPoint] = []
    for k in config.k_values:
        support_size = int(round(k * matrix.n_vars))
        trials = {algo: 0 for algo in config.algorithms}
        successes = {algo: 0 for algo in config.algorithms}

        def done(algo):
            fails = trials[algo] - successes[algo]
            return fails >= config.min_failures or trials[algo] >= config.max_trials

        for index in range(config.max_trials):
            todo = [algo for algo in config.algorithms if not done(algo)]
            if not todo:
                break
            signal, y, dec_seed = trial_instance(
                matrix, support_size, trial_seed(config.seed, index))
            for algo in todo:
                result = decode(algo, matrix, y, max_iter=config.max_iter,
                                eps=config.eps, seed=dec_seed)
                trials[algo] += 1
                if reconstruction_success(signal, result.estimate,
                                          config.success_tol):
                    successes[algo] += 1
        for algo in config.algorithms:
            n, s = trials[algo], successes[algo]
            points.append(SweepPoint(
                algorithm=algo, k=k, K=support_size,
                n_vars=matrix.n_vars, n_checks=matrix.n_checks,
                trials=n, successes=s, failures=n - s,
                p_success=s / n, master_seed=config.seed))
    return points


# ---------------------------------------------------------------------------
# results table
# ---------------------------------------------------------------------------

def format_results(points) -> str:
    lines = [",".join(RESULT_COLUMNS)]
    for p in points:
        lines.append(
            f"{p.algorithm},{p.k!r},{p.K},{p.n_vars},{p.n_checks},"
            f"{p.trials},{p.successes},{p.failures},{p.p_success!r},{p.master_seed}"
        )
    return "\n".join(lines) + "\n"


def parse_results(text) -> list[SweepPoint]:
    if hasattr(text, "read"):
        text = text.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != ",".join(RESULT_COLUMNS):
        raise ValueError("results file: missing or unexpected header line")
    points = []
    for i, ln in enumerate(lines[1:], start=2):
        toks = ln.split(",")
        if len(toks) != len(RESULT_COLUMNS):
            raise ValueError(f"results file line {i}: expected "
                             f"{len(RESULT_COLUMNS)} columns, got {len(toks)}")
        points.append(SweepPoint(
            algorithm=toks[0], k=float(toks[1]), K=int(toks[2]),
            n_vars=int(toks[3]), n_checks=int(toks[4]), trials=int(toks[5]),
            successes=int(toks[6]), failures=int(toks[7]),
            p_success=float(toks[8]), master_seed=int(toks[9])))
    return points


def emit_results(points, path, plot_path=None):
    """Persist the results table and, optionally, the SVG plot."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_results(points))
    written = [str(path)]
    if plot_path is not None:
        write_plot(points, plot_path)
        written.append(str(plot_path))
    return written


# ---------------------------------------------------------------------------
# plotting: a small hand-rendered SVG so output is byte-deterministic
# ---------------------------------------------------------------------------

_PLOT_W, _PLOT_H = 640, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 160, 30, 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def render_plot_svg(points) -> str:
    """Success probability against sparsity, one polyline per algorithm."""
    series: dict[str, list[tuple[float, float]]] = {}
    for p in points:
        series.setdefault(p.algorithm, []).append((p.k, p.p_success))
    if not series:
        raise ValueError("no sweep points to plot")
    k_max = max(k for pts in series.values() for k, _ in pts)
    if k_max <= 0:
        k_max = 1.0
    inner_w = _PLOT_W - _MARGIN_L - _MARGIN_R
    inner_h = _PLOT_H - _MARGIN_T - _MARGIN_B

    def sx(k: float) -> float:
        return _MARGIN_L + inner_w * (k / k_max)

    def sy(p: float) -> float:
        return _MARGIN_T + inner_h * (1.0 - p)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_PLOT_W}" '
        f'height="{_PLOT_H}" viewBox="0 0 {_PLOT_W} {_PLOT_H}">',
        f'<rect width="{_PLOT_W}" height="{_PLOT_H}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{inner_w}" '
        f'height="{inner_h}" fill="none" stroke="black"/>',
    ]
    for i in range(5):
        frac = i / 4
        x = _MARGIN_L + inner_w * frac
        y = _MARGIN_T + inner_h * (1 - frac)
        out.append(f'<text x="{x:.1f}" y="{_PLOT_H - _MARGIN_B + 20}" '
                   f'font-size="12" text-anchor="middle">{frac * k_max:.3g}</text>')
        out.append(f'<text x="{_MARGIN_L - 8}" y="{y + 4:.1f}" font-size="12" '
                   f'text-anchor="end">{frac:.2f}</text>')
        if i > 0:
            out.append(f'<line x1="{_MARGIN_L}" y1="{y:.1f}" '
                       f'x2="{_MARGIN_L + inner_w}" y2="{y:.1f}" '
                       f'stroke="#dddddd"/>')
    out.append(f'<text x="{_MARGIN_L + inner_w / 2:.1f}" y="{_PLOT_H - 15}" '
               f'font-size="14" text-anchor="middle">sparsity k</text>')
    out.append(f'<text x="18" y="{_MARGIN_T + inner_h / 2:.1f}" font-size="14" '
               f'text-anchor="middle" transform="rotate(-90 18 '
               f'{_MARGIN_T + inner_h / 2:.1f})">success probability</text>')
    for i, (algo, pts) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{sx(k):.2f},{sy(p):.2f}" for k, p in sorted(pts))
        out.append(f'<polyline points="{coords}" fill="none" '
                   f'stroke="{color}" stroke-width="2"/>')
        for k, p in sorted(pts):
            out.append(f'<circle cx="{sx(k):.2f}" cy="{sy(p):.2f}" r="3" '
                       f'fill="{color}"/>')
        ly = _MARGIN_T + 16 + 18 * i
        lx = _PLOT_W - _MARGIN_R + 14
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly}" font-size="13">{algo}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(points, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(render_plot_svg(points))
