import numpy as np
import pytest

from ipvb import (
    AlistError,
    GirthError,
    GraphError,
    SensingMatrix,
    count_4cycles,
    expand_qc,
    generate_regular,
    measure,
    parse_alist,
    write_alist,
)
from ipvb.graph import parse_base_matrix, write_base_matrix

TINY_ALIST = """\
3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


def test_parse_alist_tiny():
    m = parse_alist(TINY_ALIST)
    assert m.shape == (2, 3)
    assert [list(r) for r in m.check_neighbors] == [[0, 1], [1, 2]]
    assert [list(c) for c in m.var_neighbors] == [[0], [0, 1], [1]]


def test_parse_alist_accepts_unpadded_lines():
    text = TINY_ALIST.replace("1 0\n", "1\n").replace("2 0\n", "2\n")
    assert parse_alist(text) == parse_alist(TINY_ALIST)


def test_alist_round_trip_regular(matrix_a):
    text = write_alist(matrix_a)
    assert write_alist(parse_alist(text)) == text
    assert parse_alist(text) == matrix_a


def test_alist_degree_sum_mismatch():
    text = TINY_ALIST.replace("1 2 1", "1 1 1")
    with pytest.raises(AlistError, match="degree sum mismatch") as err:
        parse_alist(text)
    assert err.value.line == 4


def test_alist_malformed_header():
    with pytest.raises(AlistError, match="line 1"):
        parse_alist("3\n2 2\n")
    with pytest.raises(AlistError, match="line 2"):
        parse_alist("3 2\n2\n")


def test_alist_index_out_of_range():
    text = TINY_ALIST.replace("1 2\n2 3\n", "1 2\n2 4\n")
    with pytest.raises(AlistError, match="out of range") as err:
        parse_alist(text)
    assert err.value.line == 9


def test_alist_duplicate_index():
    text = TINY_ALIST.replace("1 2\n2 3\n", "2 2\n2 3\n")
    with pytest.raises(AlistError, match="duplicate"):
        parse_alist(text)


def test_alist_inconsistent_sides():
    text = TINY_ALIST.replace("1 2\n2 3\n", "1 3\n2 2\n")
    with pytest.raises(AlistError, match="disagree"):
        parse_alist(text)


def test_sensing_matrix_validation():
    with pytest.raises(GraphError, match="no neighbors"):
        SensingMatrix(2, 2, [[0, 1], []])
    with pytest.raises(GraphError, match="no neighbors"):
        SensingMatrix(1, 2, [[0]])  # variable 1 isolated
    with pytest.raises(GraphError, match="duplicate"):
        SensingMatrix(1, 2, [[0, 0]])
    with pytest.raises(GraphError, match="out of range"):
        SensingMatrix(1, 2, [[0, 2]])
    with pytest.raises(GraphError, match="disagree"):
        SensingMatrix(2, 2, [[0, 1], [0, 1]], var_neighbors=[[0], [0, 1]])


def test_dense_round_trip(tiny_matrix):
    dense = tiny_matrix.to_dense()
    assert np.array_equal(dense, [[1, 1, 0], [0, 1, 1]])
    assert SensingMatrix.from_dense(dense) == tiny_matrix


def test_edge_views_consistent(matrix_a):
    m = matrix_a
    # check-major and variable-major views index the same edge set
    assert m.n_edges == int(m.check_deg.sum()) == int(m.var_deg.sum())
    owner = np.repeat(np.arange(m.n_checks), m.check_deg)
    assert np.array_equal(owner[m.var_eidx], m.var_check)
    recovered = m.check_var[m.var_eidx]
    assert np.array_equal(recovered, np.repeat(np.arange(m.n_vars), m.var_deg))


def test_generate_regular_paper_size(matrix_a):
    assert matrix_a.shape == (252, 504)
    assert np.all(matrix_a.var_deg == 3)
    # 1512 edges over 252 checks balance exactly
    assert np.all(matrix_a.check_deg == 6)


def test_generate_regular_deterministic():
    a = generate_regular(40, 20, 3, seed=9, avoid_4cycles=True)
    b = generate_regular(40, 20, 3, seed=9, avoid_4cycles=True)
    assert a == b
    c = generate_regular(40, 20, 3, seed=10, avoid_4cycles=True)
    assert a != c


def test_generate_regular_girth_unmet():
    with pytest.raises(GirthError, match="girth target unmet"):
        generate_regular(2, 2, 2, seed=0, avoid_4cycles=True, max_attempts=5)


def test_generate_regular_infeasible():
    with pytest.raises(GraphError, match="infeasible"):
        generate_regular(4, 2, 3, seed=0)


def test_expand_qc_zero_shift():
    m = expand_qc([[0]], 3)
    assert m.to_dense().tolist() == np.eye(3, dtype=int).tolist()


def test_expand_qc_single_circulant():
    m = expand_qc([[1]], 3)
    # check k connects variable (k + 1) mod 3
    assert [list(r) for r in m.check_neighbors] == [[1], [2], [0]]


def test_expand_qc_paper_size(matrix_b):
    assert matrix_b.shape == (384, 768)


def test_expand_qc_edge_count():
    rng = np.random.default_rng(3)
    base = rng.integers(-1, 8, size=(4, 9))
    if not np.all(np.any(base >= 0, axis=0)):
        base[0] = np.abs(base[0])
    if not np.all(np.any(base >= 0, axis=1)):
        base[:, 0] = np.abs(base[:, 0])
    z = 8
    m = expand_qc(base, z)
    assert m.n_edges == z * int(np.count_nonzero(base >= 0))


def test_expand_qc_entry_errors():
    with pytest.raises(GraphError, match="base entries"):
        expand_qc([[3]], 3)
    with pytest.raises(GraphError, match="base entries"):
        expand_qc([[-2]], 3)


def test_count_4cycles_examples(tiny_matrix):
    assert count_4cycles(tiny_matrix) == 0
    assert count_4cycles(SensingMatrix.from_dense([[1, 1], [1, 1]])) == 1


def test_count_4cycles_permutation_invariant():
    rng = np.random.default_rng(0)
    m = generate_regular(30, 12, 3, seed=4)
    dense = m.to_dense()
    permuted = dense[rng.permutation(12)][:, rng.permutation(30)]
    assert count_4cycles(SensingMatrix.from_dense(permuted)) == count_4cycles(m)


def test_measure_examples(tiny_matrix):
    assert measure(tiny_matrix, [0.0, 2.0, 0.0]).tolist() == [2.0, 2.0]
    assert measure(tiny_matrix, np.zeros(3)).tolist() == [0.0, 0.0]


def test_measure_matches_dense(matrix_a):
    from ipvb import generate_signal

    sig = generate_signal(504, 20, seed=5)
    y = measure(matrix_a, sig)
    dense = matrix_a.to_dense().astype(float)
    assert np.allclose(y, dense @ sig.to_dense(), rtol=0, atol=1e-12)


def test_measure_errors(tiny_matrix):
    with pytest.raises(GraphError, match="length"):
        measure(tiny_matrix, [1.0, 2.0])
    with pytest.raises(GraphError, match="nonnegative"):
        measure(tiny_matrix, [-1.0, 0.0, 0.0])


def test_base_matrix_round_trip():
    base = np.array([[-1, 3], [2, -1]])
    text = write_base_matrix(base, 4)
    parsed, z = parse_base_matrix(text)
    assert z == 4
    assert np.array_equal(parsed, base)


def test_base_matrix_errors():
    with pytest.raises(GraphError, match="expected 'm_b n_b z'"):
        parse_base_matrix("1 2\n0 1\n")
    with pytest.raises(GraphError, match="base entries"):
        parse_base_matrix("1 2 4\n0 9\n")
