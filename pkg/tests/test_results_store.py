# -*- coding: utf-8 -*-
import json

import numpy as np
import pandas as pd
import pytest

from lattice import LatticeSpec
from perm_algebra import exp_neg_beta_H
from results_store import HEADER_DTYPE, read_coefficients, write_coefficients, write_csv, write_json


def test_coefficient_file_layout(tmp_path):
    coeffs = exp_neg_beta_H(LatticeSpec(1, 4), 1.0)
    path = tmp_path / "ring4.bin"
    write_coefficients(coeffs, 1.0, 1e-12, str(path))

    raw = path.read_bytes()
    assert len(raw) == HEADER_DTYPE.itemsize + 16 * coeffs.support
    assert int(np.frombuffer(raw[:8], dtype="<i8")[0]) == 4

    back, meta = read_coefficients(str(path))
    assert meta == {"N": 4, "beta": 1.0, "tol": 1e-12, "count": coeffs.support}
    np.testing.assert_array_equal(back.ranks, coeffs.ranks)
    np.testing.assert_array_equal(back.values, coeffs.values)


def test_truncated_coefficient_file(tmp_path):
    coeffs = exp_neg_beta_H(LatticeSpec(1, 3), 1.0)
    path = tmp_path / "tri.bin"
    write_coefficients(coeffs, 1.0, 1e-12, str(path))
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(ValueError):
        read_coefficients(str(path))


def test_csv_full_precision(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(pd.DataFrame({"k": [0, 1], "trace": [1.0, 1 / 3]}), str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "k,trace"
    assert lines[2] == "1,0.33333333333333331"


def test_json_to_stdout(capsys):
    write_json({"beta": 2.0, "nota": "ação"})
    data = json.loads(capsys.readouterr().out)
    assert data["schema_version"] == 1
    assert data["nota"] == "ação"
