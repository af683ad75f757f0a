"""Conditional probability tables and their TSV formats."""

import numpy as np
import pytest

from boxlat import DataFormatError
from boxlat.cpd import (
    CpdTable,
    load_cpd,
    load_marginals_tsv,
    load_matrix_tsv,
    save_cpd,
    save_marginals_tsv,
    save_matrix_tsv,
)


def two_var_table():
    # P(a)=0.3, P(b)=0.6, P(a,b)=0.18 (independent).
    cond = np.array([[1.0, 0.3], [0.6, 1.0]])
    return CpdTable(["a", "b"], np.array([0.3, 0.6]), cond)


class TestCpdTable:
    def test_joint_matrix(self):
        J = two_var_table().joint()
        assert J[0, 1] == pytest.approx(0.18)
        assert J[1, 0] == pytest.approx(0.18)

    def test_accessors(self):
        t = two_var_table()
        assert t.marginal("b") == 0.6
        assert t.conditional("a", "b") == 0.3
        assert len(t) == 2

    def test_check_passes_consistent(self):
        t = two_var_table()
        assert t.check() is t

    def test_check_rejects_asymmetric_joint(self):
        cond = np.array([[1.0, 0.9], [0.6, 1.0]])
        t = CpdTable(["a", "b"], np.array([0.3, 0.6]), cond)
        with pytest.raises(ValueError, match="asymmetry"):
            t.check()

    def test_check_rejects_out_of_range(self):
        cond = np.array([[1.0, 1.4], [0.2, 1.0]])
        t = CpdTable(["a", "b"], np.array([0.5, 0.5]), cond)
        with pytest.raises(ValueError, match="outside"):
            t.check()

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            CpdTable(["a", "b"], np.array([0.5]), np.eye(2))
        with pytest.raises(ValueError):
            CpdTable(["a", "b"], np.array([0.5, 0.5]), np.eye(3))


class TestMatrixTsv:
    def test_round_trip_12_digits(self, tmp_path):
        names = ["x", "y", "z"]
        rng = np.random.default_rng(0)
        m = rng.uniform(0, 1, size=(3, 3))
        p = tmp_path / "m.tsv"
        save_matrix_tsv(p, names, m)
        names2, m2 = load_matrix_tsv(p)
        assert names2 == names
        assert np.max(np.abs(m2 - m)) < 1e-11

    def test_header_layout(self, tmp_path):
        p = tmp_path / "m.tsv"
        save_matrix_tsv(p, ["a", "b"], np.array([[0.0, 0.5], [0.25, 0.0]]))
        lines = p.read_text().splitlines()
        assert lines[0] == "id\ta\tb"
        assert lines[1] == "a\t0\t0.5"
        assert lines[2] == "b\t0.25\t0"

    def test_row_order_must_match_header(self, tmp_path):
        p = tmp_path / "m.tsv"
        p.write_text("id\ta\tb\nb\t0\t1\na\t1\t0\n")
        with pytest.raises(DataFormatError, match=":2:"):
            load_matrix_tsv(p)

    def test_column_count_checked(self, tmp_path):
        p = tmp_path / "m.tsv"
        p.write_text("id\ta\tb\na\t0.5\n")
        with pytest.raises(DataFormatError, match=":2:"):
            load_matrix_tsv(p)

    def test_missing_rows(self, tmp_path):
        p = tmp_path / "m.tsv"
        p.write_text("id\ta\tb\na\t0\t1\n")
        with pytest.raises(DataFormatError, match="expected 2 rows"):
            load_matrix_tsv(p)

    def test_non_numeric_cell(self, tmp_path):
        p = tmp_path / "m.tsv"
        p.write_text("id\ta\na\tnot-a-number\n")
        with pytest.raises(DataFormatError, match=":2:"):
            load_matrix_tsv(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "m.tsv"
        p.write_text("")
        with pytest.raises(DataFormatError, match=":1:"):
            load_matrix_tsv(p)


class TestMarginalsTsv:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "g.tsv"
        save_marginals_tsv(p, ["a", "b"], [1.0 / 3.0, 0.25])
        names, probs = load_marginals_tsv(p)
        assert names == ["a", "b"]
        assert probs[0] == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert probs[1] == 0.25

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("a\t0.5\n\nb\t0.25\n")
        names, probs = load_marginals_tsv(p)
        assert names == ["a", "b"]

    def test_bad_column_count(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("a\t0.5\t0.6\n")
        with pytest.raises(DataFormatError, match=":1:"):
            load_marginals_tsv(p)


class TestCpdPair:
    def test_save_load_identity(self, tmp_path, toy_table):
        mp, gp = tmp_path / "m.tsv", tmp_path / "g.tsv"
        save_cpd(mp, gp, toy_table)
        loaded = load_cpd(mp, gp)
        assert loaded.names == toy_table.names
        assert np.max(np.abs(loaded.cond - toy_table.cond)) < 1e-11
        assert np.max(np.abs(loaded.marginals - toy_table.marginals)) < 1e-11
        loaded.check(tol=1e-9)

    def test_mismatched_ids_rejected(self, tmp_path):
        mp, gp = tmp_path / "m.tsv", tmp_path / "g.tsv"
        save_matrix_tsv(mp, ["a", "b"], np.eye(2))
        save_marginals_tsv(gp, ["a", "c"], [0.5, 0.5])
        with pytest.raises(DataFormatError, match="do not match"):
            load_cpd(mp, gp)
