"""Sparse binary sensing matrices and their bipartite-graph representation.

A sensing matrix is stored as dual adjacency lists: for every check (row)
the sorted variable indices it touches, and for every variable (column)
the sorted check indices touching it.  Indices are 0-based in memory and
1-based in the alist / base-matrix file formats.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "GraphError",
    "AlistError",
    "GirthError",
    "SensingMatrix",
    "parse_alist",
    "write_alist",
    "load_alist",
    "save_alist",
    "generate_regular",
    "expand_qc",
    "parse_base_matrix",
    "load_base_matrix",
    "write_base_matrix",
    "count_4cycles",
    "measure",
]


class GraphError(ValueError):
    """Invalid sensing-matrix structure or parameters."""


class AlistError(GraphError):
    """Malformed alist input; carries the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class GirthError(GraphError):
    """A 4-cycle-free matrix could not be constructed."""


class SensingMatrix:
    """Binary M x N measurement matrix as a bipartite graph.

    Construction validates the structure: indices in range, no duplicate
    entries in a neighbor list, every check and every variable of degree
    at least one, and (when both sides are supplied) dual-list
    consistency.  Instances are immutable after construction and safe to
    share between concurrent decodes.

    Besides the adjacency lists, the constructor precomputes flat
    edge-indexed arrays used by the decoder kernels:

    * ``check_ptr`` / ``check_var`` -- CSR-style check-major edge list,
      edge ``e`` of check ``m`` (``check_ptr[m] <= e < check_ptr[m+1]``)
      points at variable ``check_var[e]``;
    * ``var_ptr`` / ``var_eidx`` / ``var_check`` -- the same edges in
      variable-major order, ``var_eidx`` holding check-major edge ids;
    * ``var_check_pad`` / ``var_slot_mask`` -- the variable-major check
      ids padded to a rectangular array for vectorized kernels.
    """

    def __init__(self, n_checks, n_vars, check_neighbors, var_neighbors=None):
        n_checks = int(n_checks)
        n_vars = int(n_vars)
        if n_checks < 1 or n_vars < 1:
            raise GraphError("matrix dimensions must be positive")
        if len(check_neighbors) != n_checks:
            raise GraphError(
                f"expected {n_checks} check neighbor lists, got {len(check_neighbors)}"
            )
        rows = []
        for m, nbrs in enumerate(check_neighbors):
            arr = np.array(sorted(int(n) for n in nbrs), dtype=np.int32)
            if arr.size == 0:
                raise GraphError(f"check {m} has no neighbors")
            if arr[0] < 0 or arr[-1] >= n_vars:
                raise GraphError(f"check {m}: variable index out of range")
            if arr.size > 1 and np.any(np.diff(arr) == 0):
                raise GraphError(f"check {m}: duplicate variable index")
            rows.append(arr)

        derived = [[] for _ in range(n_vars)]
        for m, arr in enumerate(rows):
            for n in arr.tolist():
                derived[n].append(m)
        if var_neighbors is not None:
            if len(var_neighbors) != n_vars:
                raise GraphError(
                    f"expected {n_vars} variable neighbor lists, got {len(var_neighbors)}"
                )
            for n, nbrs in enumerate(var_neighbors):
                if sorted(int(m) for m in nbrs) != derived[n]:
                    raise GraphError(
                        f"variable {n}: neighbor list disagrees with the check side"
                    )
        cols = []
        for n, ms in enumerate(derived):
            if not ms:
                raise GraphError(f"variable {n} has no neighbors")
            cols.append(np.array(ms, dtype=np.int32))

        self.n_checks = n_checks
        self.n_vars = n_vars
        self._rows = tuple(rows)
        self._cols = tuple(cols)

        check_deg = np.array([r.size for r in rows], dtype=np.int32)
        var_deg = np.array([c.size for c in cols], dtype=np.int32)
        check_ptr = np.zeros(n_checks + 1, dtype=np.int64)
        np.cumsum(check_deg, out=check_ptr[1:])
        var_ptr = np.zeros(n_vars + 1, dtype=np.int64)
        np.cumsum(var_deg, out=var_ptr[1:])
        check_var = np.concatenate(rows)
        check_of_edge = np.repeat(np.arange(n_checks, dtype=np.int32), check_deg)
        # variable-major view of the check-major edge list
        order = np.lexsort((check_of_edge, check_var)).astype(np.int64)

        self.check_deg = check_deg
        self.check_ptr = check_ptr
        self.check_var = check_var
        self.var_deg = var_deg
        self.var_ptr = var_ptr
        self.var_eidx = order
        self.var_check = check_of_edge[order]
        self.var_owner = np.repeat(np.arange(n_vars, dtype=np.int32), var_deg)

        self.dc_max = int(check_deg.max())
        self.dv_max = int(var_deg.max())
        pad = np.full((n_vars, self.dv_max), -1, dtype=np.int32)
        mask = np.arange(self.dv_max)[None, :] < var_deg[:, None]
        pad[mask] = self.var_check
        self.var_check_pad = pad
        self.var_slot_mask = mask

        for arr in (check_deg, check_ptr, check_var, var_deg, var_ptr,
                    self.var_eidx, self.var_check, self.var_owner, pad, mask):
            arr.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_checks, self.n_vars)

    @property
    def n_edges(self) -> int:
        return int(self.check_var.size)

    @property
    def check_neighbors(self) -> tuple[np.ndarray, ...]:
        """For each check m, the sorted variable indices N(m)."""
        return self._rows

    @property
    def var_neighbors(self) -> tuple[np.ndarray, ...]:
        """For each variable n, the sorted check indices M(n)."""
        return self._cols

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_checks, self.n_vars), dtype=np.uint8)
        for m, nbrs in enumerate(self._rows):
            dense[m, nbrs] = 1
        return dense

    @classmethod
    def from_dense(cls, array) -> "SensingMatrix":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise GraphError("dense matrix must be 2-D")
        rows = [np.flatnonzero(arr[m]) for m in range(arr.shape[0])]
        return cls(arr.shape[0], arr.shape[1], rows)

    def __eq__(self, other):
        if not isinstance(other, SensingMatrix):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.check_ptr, other.check_ptr)
                and np.array_equal(self.check_var, other.check_var))

    __hash__ = None

    def __repr__(self):
        return (f"SensingMatrix({self.n_checks}x{self.n_vars}, "
                f"{self.n_edges} edges)")


def measure(matrix: SensingMatrix, x) -> np.ndarray:
    """Measurement vector y with y_m = sum of x over the neighbors of m."""
    vec = x.to_dense() if hasattr(x, "to_dense") else np.asarray(x, dtype=np.float64)
    if vec.shape != (matrix.n_vars,):
        raise GraphError(
            f"signal length {vec.size} does not match {matrix.n_vars} variables"
        )
    if np.any(vec < 0):
        raise GraphError("signal entries must be nonnegative")
    return np.add.reduceat(vec[matrix.check_var], matrix.check_ptr[:-1])


def count_4cycles(matrix: SensingMatrix) -> int:
    """Number of length-4 cycles: pairs of checks counted per shared variable pair.

    Zero exactly when no two checks share two or more variables (girth > 4).
    """
    counts: dict[tuple[int, int], int] = {}
    for nbrs in matrix.check_neighbors:
        lst = nbrs.tolist()
        for i in range(len(lst)):
            for j in range(i + 1, len(lst)):
                key = (lst[i], lst[j])
                counts[key] = counts.get(key, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


# ---------------------------------------------------------------------------
# alist interchange format
# ---------------------------------------------------------------------------

def parse_alist(text) -> SensingMatrix:
    """Parse alist text into a SensingMatrix.

    Layout: line 1 "N M"; line 2 "dv_max dc_max"; line 3 the N column
    degrees; line 4 the M row degrees; then N lines of 1-based check
    indices per variable and M lines of 1-based variable indices per
    check, each optionally zero-padded to the declared maximum degree.
    Raises AlistError with the offending line number on malformed input.
    """
    if hasattr(text, "read"):
        text = text.read()
    lines = text.splitlines()

    def ints(idx: int) -> list[int]:
        if idx >= len(lines):
            raise AlistError(len(lines) + 1, "unexpected end of file")
        try:
            return [int(tok) for tok in lines[idx].split()]
        except ValueError:
            raise AlistError(idx + 1, "non-integer token") from None

    header = ints(0)
    if len(header) != 2:
        raise AlistError(1, "malformed header: expected 'N M'")
    n_vars, n_checks = header
    if n_vars < 1 or n_checks < 1:
        raise AlistError(1, "malformed header: dimensions must be positive")
    maxima = ints(1)
    if len(maxima) != 2:
        raise AlistError(2, "malformed header: expected 'dv_max dc_max'")
    dv_max, dc_max = maxima
    if dv_max < 1 or dc_max < 1:
        raise AlistError(2, "malformed header: maximum degrees must be positive")

    col_deg = ints(2)
    if len(col_deg) != n_vars:
        raise AlistError(3, f"expected {n_vars} column degrees, got {len(col_deg)}")
    if any(d < 1 for d in col_deg):
        raise AlistError(3, "column degree must be positive")
    if max(col_deg) > dv_max:
        raise AlistError(3, "column degree exceeds declared maximum")
    row_deg = ints(3)
    if len(row_deg) != n_checks:
        raise AlistError(4, f"expected {n_checks} row degrees, got {len(row_deg)}")
    if any(d < 1 for d in row_deg):
        raise AlistError(4, "row degree must be positive")
    if max(row_deg) > dc_max:
        raise AlistError(4, "row degree exceeds declared maximum")
    if sum(col_deg) != sum(row_deg):
        raise AlistError(4, "degree sum mismatch between column and row degrees")

    def read_block(start: int, degrees: list[int], dmax: int, limit: int) -> list[list[int]]:
        block = []
        for i, deg in enumerate(degrees):
            line_no = start + i
            vals = ints(line_no)
            if len(vals) not in (deg, dmax):
                raise AlistError(
                    line_no + 1,
                    f"expected {deg} indices (optionally zero-padded to {dmax}), got {len(vals)}",
                )
            body, padding = vals[:deg], vals[deg:]
            if any(p != 0 for p in padding):
                raise AlistError(line_no + 1, "nonzero entry in zero padding")
            for v in body:
                if v < 1 or v > limit:
                    raise AlistError(line_no + 1, f"index {v} out of range [1, {limit}]")
            if len(set(body)) != deg:
                raise AlistError(line_no + 1, "duplicate index")
            block.append(sorted(v - 1 for v in body))
        return block

    var_side = read_block(4, col_deg, dv_max, n_checks)
    check_side = read_block(4 + n_vars, row_deg, dc_max, n_vars)
    for extra in range(4 + n_vars + n_checks, len(lines)):
        if lines[extra].strip():
            raise AlistError(extra + 1, "unexpected trailing content")

    derived = [[] for _ in range(n_checks)]
    for n, ms in enumerate(var_side):
        for m in ms:
            derived[m].append(n)
    for m in range(n_checks):
        if sorted(derived[m]) != check_side[m]:
            raise AlistError(
                4 + n_vars + m + 1,
                f"check {m + 1} neighbor list disagrees with the variable lists",
            )
    return SensingMatrix(n_checks, n_vars, check_side, var_neighbors=var_side)


def write_alist(matrix: SensingMatrix) -> str:
    """Canonical alist serialization: sorted indices, zero-padded, LF endings."""
    out = [
        f"{matrix.n_vars} {matrix.n_checks}",
        f"{matrix.dv_max} {matrix.dc_max}",
        " ".join(str(int(d)) for d in matrix.var_deg),
        " ".join(str(int(d)) for d in matrix.check_deg),
    ]
    for nbrs in matrix.var_neighbors:
        vals = [str(int(m) + 1) for m in nbrs]
        vals += ["0"] * (matrix.dv_max - len(vals))
        out.append(" ".join(vals))
    for nbrs in matrix.check_neighbors:
        vals = [str(int(n) + 1) for n in nbrs]
        vals += ["0"] * (matrix.dc_max - len(vals))
        out.append(" ".join(vals))
    return "\n".join(out) + "\n"


def load_alist(path) -> SensingMatrix:
    with open(path, "r", encoding="ascii") as fh:
        return parse_alist(fh.read())


def save_alist(matrix: SensingMatrix, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(write_alist(matrix))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def generate_regular(n_vars, n_checks, var_degree, seed, avoid_4cycles=False,
                     max_attempts=64, column_retries=200) -> SensingMatrix:
    """Random column-regular matrix with balanced check degrees.

    Each column receives ``var_degree`` ones placed into the currently
    least-filled rows with random tie-breaking, so check degrees vary by
    at most one around N*var_degree/M.  With ``avoid_4cycles`` a column
    that would make two checks share a second variable is redrawn up to
    ``column_retries`` times; if a column cannot be placed the whole
    matrix is restarted, and after ``max_attempts`` restarts GirthError
    is raised.  Identical arguments produce an identical matrix.
    """
    n_vars = int(n_vars)
    n_checks = int(n_checks)
    var_degree = int(var_degree)
    if n_vars < 1 or n_checks < 1:
        raise GraphError("matrix dimensions must be positive")
    if var_degree < 1:
        raise GraphError("var_degree must be at least 1")
    if var_degree > n_checks:
        raise GraphError(
            f"infeasible parameters: var_degree {var_degree} exceeds {n_checks} checks"
        )
    rng = np.random.default_rng(seed)
    attempts = max(1, int(max_attempts)) if avoid_4cycles else 1
    for _ in range(attempts):
        columns = _place_columns(rng, n_vars, n_checks, var_degree,
                                 avoid_4cycles, column_retries)
        if columns is not None:
            check_lists = [[] for _ in range(n_checks)]
            for n, rows in enumerate(columns):
                for m in rows:
                    check_lists[m].append(n)
            return SensingMatrix(n_checks, n_vars, check_lists)
    raise GirthError(f"girth target unmet after {max_attempts} restarts")


def _place_columns(rng, n_vars, n_checks, degree, avoid_4cycles, column_retries):
    fill = np.zeros(n_checks, dtype=np.int64)
    seen_pairs: set[tuple[int, int]] = set()
    columns = []
    retries = max(1, int(column_retries)) if avoid_4cycles else 1
    for _ in range(n_vars):
        placed = None
        for _ in range(retries):
            rows = _draw_column(rng, fill, degree)
            if not avoid_4cycles:
                placed = rows
                break
            pairs = [(rows[i], rows[j])
                     for i in range(degree) for j in range(i + 1, degree)]
            if not any(p in seen_pairs for p in pairs):
                seen_pairs.update(pairs)
                placed = rows
                break
        if placed is None:
            return None
        fill[placed] += 1
        columns.append(placed)
    return columns


def _draw_column(rng, fill, degree):
    avail = np.ones(fill.size, dtype=bool)
    rows = []
    for _ in range(degree):
        level = fill[avail].min()
        cand = np.flatnonzero(avail & (fill == level))
        pick = int(cand[rng.integers(cand.size)])
        rows.append(pick)
        avail[pick] = False
    rows.sort()
    return rows


def expand_qc(base, z) -> SensingMatrix:
    """Circulant lift of a base matrix.

    Entry -1 expands to a z x z zero block; entry s in [0, z) expands to
    the identity circulantly shifted right by s (row k carries a one in
    column (k + s) mod z).
    """
    base = np.asarray(base, dtype=np.int64)
    if base.ndim != 2:
        raise GraphError("base matrix must be 2-D")
    z = int(z)
    if z < 1:
        raise GraphError("lift size must be at least 1")
    if np.any(base < -1) or np.any(base >= z):
        raise GraphError(f"base entries must lie in [-1, {z - 1}]")
    m_b, n_b = base.shape
    check_lists = []
    for bi in range(m_b):
        shifts = [(bj, int(s)) for bj, s in enumerate(base[bi]) if s >= 0]
        for k in range(z):
            check_lists.append([bj * z + (k + s) % z for bj, s in shifts])
    return SensingMatrix(m_b * z, n_b * z, check_lists)


def parse_base_matrix(text) -> tuple[np.ndarray, int]:
    """Parse a base-matrix file: line 1 "m_b n_b z", then m_b rows of n_b shifts."""
    if hasattr(text, "read"):
        text = text.read()
    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise GraphError("base-matrix file is empty")
    try:
        header = [int(tok) for tok in lines[0].split()]
    except ValueError:
        raise GraphError("base-matrix line 1: non-integer token") from None
    if len(header) != 3:
        raise GraphError("base-matrix line 1: expected 'm_b n_b z'")
    m_b, n_b, z = header
    if m_b < 1 or n_b < 1 or z < 1:
        raise GraphError("base-matrix line 1: dimensions must be positive")
    if len([ln for ln in lines[1:] if ln.strip()]) < m_b:
        raise GraphError(f"base-matrix: expected {m_b} rows")
    rows = []
    for i in range(m_b):
        try:
            vals = [int(tok) for tok in lines[1 + i].split()]
        except ValueError:
            raise GraphError(f"base-matrix line {i + 2}: non-integer token") from None
        if len(vals) != n_b:
            raise GraphError(
                f"base-matrix line {i + 2}: expected {n_b} entries, got {len(vals)}"
            )
        rows.append(vals)
    base = np.array(rows, dtype=np.int64)
    if np.any(base < -1) or np.any(base >= z):
        raise GraphError(f"base entries must lie in [-1, {z - 1}]")
    return base, z


def load_base_matrix(path) -> tuple[np.ndarray, int]:
    with open(path, "r", encoding="ascii") as fh:
        return parse_base_matrix(fh.read())


def write_base_matrix(base, z) -> str:
    base = np.asarray(base, dtype=np.int64)
    lines = [f"{base.shape[0]} {base.shape[1]} {int(z)}"]
    for row in base:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"
