import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqexp.channel import ProbabilityDistribution, noiseless_binary
from cqexp.fileio import (
    FormatError,
    format_channel,
    parse_channel,
    parse_matrix,
    read_channel,
    write_channel,
)
from cqexp.sampling import sample_channel, sample_distribution

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def bits(W):
    return [M.tobytes() for M in W.outputs]


class TestChannelFormat:
    def test_flat_pairs(self):
        W, P = parse_channel('{"dim": 2, "states": [[[1,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[1,0]]]}')
        assert W == noiseless_binary()
        assert P is None

    def test_nested_rows_and_bare_reals(self):
        W, _ = parse_channel('{"dim": 2, "states": [[[0.5, 0.5], [0.5, 0.5]]]}')
        np.testing.assert_array_equal(W.outputs[0], np.full((2, 2), 0.5))

    def test_nested_rows_of_pairs(self):
        text = json.dumps({"dim": 2, "states": [[[[0.5, 0], [0, -0.5]], [[0, 0.5], [0.5, 0]]]]})
        W, _ = parse_channel(text)
        np.testing.assert_array_equal(W.outputs[0], [[0.5, -0.5j], [0.5j, 0.5]])

    def test_dim_one(self):
        W, _ = parse_channel('{"dim": 1, "states": [[[1, 0]], [[1]], [1]]}')
        assert W.alphabet_size == 3 and W.dim == 1

    def test_classical(self):
        W, P = parse_channel('{"classical": {"rows": [[1, 0], [0, 1]]}, "dist": [0.25, 0.75]}')
        assert W == noiseless_binary()
        np.testing.assert_array_equal(P.weights, [0.25, 0.75])

    @pytest.mark.parametrize(
        "text, where",
        [
            ('{"dim": 2, "states": [[1, 2, 3]]}', "states[0]"),
            ('{"dim": 2, "states": [[1, 0, 0, "x"]]}', "states[0][3]"),
            ('{"dim": 2, "states": [[[1, 0, 0], 0, 0, 0]]}', "states[0][0]"),
            ('{"dim": 0, "states": []}', "dim"),
            ('{"states": [[1]]}', "dim"),
            ('{"dim": 1}', "states"),
            ('{"dim": 1, "states": [[1]], "bogus": 1}', "bogus"),
            ('{"dim": 2, "states": [[1, 0, 0, 1]]}', "states"),
            ('{"dim": 1, "states": [[1]], "dist": [0.5, 0.5]}', "dist"),
            ('{"dim": 1, "states": [[1]], "dist": [2]}', "dist"),
            ('{"classical": {"rows": [[0.5, 0.6]]}}', "classical.rows"),
            ('{"classical": [[1]]}', "classical"),
            ("[1, 2]", "top level"),
            ('{"dim": 2,\n "states": [1,}', "line 2 column 15"),
        ],
    )
    def test_diagnostics(self, text, where):
        with pytest.raises(FormatError) as info:
            parse_channel(text, "chan.json")
        assert info.value.where == where
        assert str(info.value).startswith(f"chan.json: {where}")

    def test_missing_file(self, tmp_path):
        with pytest.raises(Exception) as info:
            read_channel(tmp_path / "nope.json")
        assert "nope.json" in str(info.value)

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_round_trip_bit_identical(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        W = sample_channel(rng, n, int(rng.integers(1, 6)))
        P = sample_distribution(rng, n)
        W2, P2 = parse_channel(format_channel(W, P))
        assert bits(W2) == bits(W)
        assert P2.weights.tobytes() == P.weights.tobytes()
        assert format_channel(W2, P2) == format_channel(W, P)

    def test_write_read(self, tmp_path):
        W = sample_channel(np.random.default_rng(1), 3, 3, "mixed")
        path = tmp_path / "w.json"
        write_channel(path, W, ProbabilityDistribution.uniform(3))
        W2, P2 = read_channel(path)
        assert bits(W2) == bits(W)
        assert P2 == ProbabilityDistribution.uniform(3)


class TestMatrixFormat:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("[4]", [[4]]),
            ("[[4]]", [[4]]),
            ("9", [[9]]),
            ("[[1, 2], [2, 5]]", [[1, 2], [2, 5]]),
            ("[1, 2, 2, 5]", [[1, 2], [2, 5]]),
            ("[[1, 0], [0, 1], [0, -1], [2, 0]]", [[1, 1j], [-1j, 2]]),
            ('{"matrix": [[2, 0], [0, 3]]}', [[2, 0], [0, 3]]),
            ("1 2\n2 5\n", [[1, 2], [2, 5]]),
            ("# comment\n1, 1j\n-1j, 2\n\n", [[1, 1j], [-1j, 2]]),
            ("1 0 0 1", [[1, 0], [0, 1]]),
        ],
    )
    def test_parses(self, text, expected):
        np.testing.assert_array_equal(parse_matrix(text), np.array(expected, dtype=complex))

    @pytest.mark.parametrize(
        "text, where",
        [
            ("1 2\n3 x\n", "line 2 column 2"),
            ("1 2\n3\n", "line 2"),
            ("1 2 3", "matrix"),
            ("", "line 1"),
            ("[1, 2,", "line 1 column 7"),
            ('{"m": 1}', "matrix"),
            ("1 nan\n0 1", "line 1 column 2"),
        ],
    )
    def test_diagnostics(self, text, where):
        with pytest.raises(FormatError) as info:
            parse_matrix(text, "m.txt")
        assert info.value.where == where
