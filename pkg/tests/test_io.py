from __future__ import annotations

import json

import numpy as np
import pytest

from multiport import NetworkSystem, evaluate
from multiport import io as mio
from multiport.metanet import build_meta_network


def test_matrix_roundtrip():
    m = np.array([[1 + 2j, 3], [0.5j, -1]])
    np.testing.assert_array_equal(mio.matrix_from_json(mio.matrix_to_json(m)), m)
    np.testing.assert_array_equal(mio.matrix_from_json([[1, [0, 2]]]), [[1, 2j]])


@pytest.mark.parametrize("data", [[1, 2], [[1, 2], [3]], [["x"]], [[[1, 2, 3]]]])
def test_matrix_errors(data):
    with pytest.raises(mio.ParseError):
        mio.matrix_from_json(data)


def test_network_roundtrip():
    s = NetworkSystem(np.eye(3) * 0.5, {"N": [2], "C": [0, 1]}, "Z", [25, 50, 75], "x")
    back = mio.network_from_json(json.loads(json.dumps(mio.network_to_json(s))))
    np.testing.assert_array_equal(back.matrix, s.matrix)
    assert back.partition == s.partition
    assert back.representation == s.representation and back.name == "x"
    np.testing.assert_array_equal(back.reference, s.reference)


def test_network_errors():
    with pytest.raises(mio.ParseError, match="missing field 'matrix'"):
        mio.network_from_json({"ports": 1})
    with pytest.raises(mio.ParseError, match="expected 2x2"):
        mio.network_from_json({"ports": 2, "matrix": [[1]]})
    with pytest.raises(mio.ParseError):
        mio.network_from_json({"ports": 2, "matrix": [[1, 0], [0, 1]], "sets": {"N": [0]}})


def test_cache_roundtrip(tmp_path):
    mn = build_meta_network(1, seed=0)
    res, cache = evaluate(mn.scheme)
    path = tmp_path / "c.npz"
    mio.save_cache(path, cache, mn.scheme)
    c2, scheme, embedded = mio.load_cache(path)
    np.testing.assert_array_equal(c2.sbar, cache.sbar)
    np.testing.assert_array_equal(c2.result, res)
    assert scheme.names == mn.scheme.names and embedded == []
    assert c2.sup.c_labels == cache.sup.c_labels
    with pytest.raises(mio.ParseError):
        mio.load_cache(tmp_path / "nope.npz")
