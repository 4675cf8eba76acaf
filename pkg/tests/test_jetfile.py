import numpy as np
import pytest

from grassconv.graphs import holomorphic_pair, lawson_osserman_graph
from grassconv.jetfile import JetFileError, format_jets, parse_jets, read_jets

HEADER_ONLY = "2 1 1\n"


def sample_text():
    return "\n".join([
        "# a paraboloid sample",
        "2 1 1",
        "0.5 0.25",
        "0.5 0.25",
        "1 0",
        "0 1",
    ]) + "\n"


def test_parse_example():
    (j,) = parse_jets(sample_text())
    np.testing.assert_array_equal(j.x, [0.5, 0.25])
    np.testing.assert_array_equal(j.Df, [[0.5], [0.25]])
    np.testing.assert_array_equal(j.D2f[:, :, 0], np.eye(2))


def test_round_trip(rng):
    g = lawson_osserman_graph()
    jets = [g(rng.standard_normal(4)) for _ in range(4)]
    back = parse_jets(format_jets(jets))
    for a, b in zip(jets, back):
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.Df, b.Df)
        np.testing.assert_array_equal(a.D2f, b.D2f)


def test_read_file(tmp_path):
    p = tmp_path / "jets.txt"
    p.write_text(format_jets([holomorphic_pair()(np.array([0.1, 0.2]))]), encoding="utf-8")
    assert len(read_jets(p)) == 1


@pytest.mark.parametrize("text,line,msg", [
    ("", 1, "empty"),
    ("2 1\n", 1, "header"),
    ("2 x 1\n", 1, "integers"),
    ("0 1 1\n", 1, "positive"),
    (HEADER_ONLY, 1, "ends before"),
    ("2 1 1\n0.5\n", 2, "coordinates"),
    ("2 1 1\n0 0\n1 2\n", 3, "truncated"),
    ("2 1 1\n0 0\n1 2 3 4 5 6 7\n", 3, "extra"),
    ("2 1 1\n0 0\n1 2\n1 zz 0 1\n", 4, "not a number"),
    ("2 1 1\n0 0\n1 2\n1 inf 0 1\n", 4, "non-finite"),
    ("2 1 1\n0 0\n1 2\n1 0.5 0 1\n", 2, "symmetric"),
    ("2 1 1\n0 0\n1 2\n1 0 0 1\n9\n", 5, "trailing"),
])
def test_errors_carry_line_numbers(text, line, msg):
    with pytest.raises(JetFileError, match=msg) as info:
        parse_jets(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")
