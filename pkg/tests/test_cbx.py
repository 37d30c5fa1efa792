import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbsolve.cbx import GenSpec, generate, operator_bands, parse_cbx, write_cbx
from cbsolve.cyclic import CyclicBlockTri
from cbsolve.dense import assemble_dense
from cbsolve.errors import DimensionError, FormatError, NonFiniteError

MIN_CBTS = """CBX1 cbts 3 1
# k=1: A B C
1 4 2
2 5 3
3 6 1
"""


def same_operator(a, b):
    return type(a) is type(b) and all(
        np.array_equal(x, y) for x, y in zip(operator_bands(a), operator_bands(b))
    )


class TestParse:
    def test_minimal_cbts(self):
        doc = parse_cbx(MIN_CBTS)
        op = doc.operator
        assert doc.kind == "cbts" and (op.n, op.m) == (3, 1)
        assert sum(b.size for b in operator_bands(op)) == 9
        assert op.a.ravel().tolist() == [1, 2, 3]
        assert op.b.ravel().tolist() == [4, 5, 6]
        assert doc.rhs is None and doc.solution is None

    def test_bytes_input(self):
        assert parse_cbx(MIN_CBTS.encode()).operator.n == 3

    def test_bad_magic(self):
        with pytest.raises(FormatError) as err:
            parse_cbx(MIN_CBTS.replace("CBX1", "CBX2"))
        assert err.value.token == 1

    def test_bad_kind(self):
        with pytest.raises(FormatError) as err:
            parse_cbx(MIN_CBTS.replace("cbts", "hexa"))
        assert err.value.token == 2

    def test_truncated(self):
        with pytest.raises(FormatError):
            parse_cbx(MIN_CBTS.rsplit("\n", 2)[0])

    def test_bad_real(self):
        with pytest.raises(FormatError) as err:
            parse_cbx(MIN_CBTS.replace("4", "four"))
        assert err.value.token == 6

    def test_non_finite(self):
        with pytest.raises(NonFiniteError):
            parse_cbx(MIN_CBTS.replace("4", "nan"))

    def test_undersized(self):
        with pytest.raises(DimensionError):
            parse_cbx("CBX1 cbps 4 1 " + "1 " * 20)

    def test_trailing_junk(self):
        with pytest.raises(FormatError):
            parse_cbx(MIN_CBTS + "RHS 1 2 3 extra")

    def test_duplicate_section(self):
        with pytest.raises(FormatError):
            parse_cbx(MIN_CBTS + "RHS 1 2 3 RHS 1 2 3")

    def test_sections(self):
        doc = parse_cbx(MIN_CBTS + "SOL 7 8 9\nRHS 1 2 3  # any order\n")
        assert doc.rhs.ravel().tolist() == [1, 2, 3]
        assert doc.solution.ravel().tolist() == [7, 8, 9]

    def test_tri_rejects_corner(self):
        text = "CBX1 tri 3 1\n5 4 2\n1 5 3\n1 6 0\n"
        with pytest.raises(FormatError) as err:
            parse_cbx(text)
        assert err.value.token == 5


class TestWrite:
    @pytest.mark.parametrize("kind", ["cbts", "cbps", "tri", "penta"])
    def test_round_trip_with_sections(self, kind, rng):
        op, rhs = generate(GenSpec(kind, 6, 2, seed=3))
        sol = rng.standard_normal((6, 2))
        doc = parse_cbx(write_cbx(op, rhs, sol))
        assert doc.kind == kind
        assert same_operator(doc.operator, op)
        assert np.array_equal(doc.rhs, rhs) and np.array_equal(doc.solution, sol)

    def test_kind_token(self):
        op, _ = generate(GenSpec("penta", 4, 1, seed=0))
        assert write_cbx(op).split()[:4] == ["CBX1", "penta", "4", "1"]

    def test_deterministic(self):
        op, rhs = generate(GenSpec("cbps", 5, 2, seed=1))
        assert write_cbx(op, rhs) == write_cbx(op, rhs)

    def test_round_trip_100(self):
        rng = np.random.default_rng(2024)
        kinds = ["cbts", "cbps", "tri", "penta"]
        for i in range(100):
            kind = kinds[i % 4]
            spec = GenSpec(kind, int(rng.integers(5, 12)), int(rng.integers(1, 5)), int(rng.integers(2**63)))
            op, rhs = generate(spec)
            doc = parse_cbx(write_cbx(op, rhs))
            assert same_operator(doc.operator, op)
            assert np.array_equal(doc.rhs, rhs)

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(
            st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=9, max_size=9
        )
    )
    def test_extreme_values(self, values):
        a = np.array(values).reshape(3, 1, 1, 3)
        op = CyclicBlockTri(a[..., 0], a[..., 1], a[..., 2])
        assert same_operator(parse_cbx(write_cbx(op)).operator, op)


class TestGenerate:
    def test_deterministic(self):
        a, ra = generate(GenSpec("cbps", 7, 3, seed=77))
        b, rb = generate(GenSpec("cbps", 7, 3, seed=77))
        assert same_operator(a, b) and np.array_equal(ra, rb)

    def test_dominance_audit(self):
        op, rhs = generate(GenSpec("cbps", 10, 3, seed=0, dominance=2.0))
        d = assemble_dense(op)
        diag = np.abs(np.diag(d))
        off = np.abs(d).sum(axis=1) - diag
        assert np.all(diag > off)
        assert np.all(np.abs(rhs) <= 1.0)

    @pytest.mark.parametrize("kind", ["cbts", "cbps", "tri", "penta"])
    def test_unit_dominance_strict(self, kind):
        for seed in range(20):
            d = assemble_dense(generate(GenSpec(kind, 6, 3, seed, dominance=1.0))[0])
            diag = np.abs(np.diag(d))
            assert np.all(diag > np.abs(d).sum(axis=1) - diag)

    def test_zero_dominance_allowed(self):
        op, _ = generate(GenSpec("cbts", 5, 2, seed=0, dominance=0.0))
        assert op.n == 5

    def test_undersized(self):
        with pytest.raises(DimensionError):
            GenSpec("cbps", 4, 2)
        with pytest.raises(DimensionError):
            GenSpec("tri", 1, 2)
