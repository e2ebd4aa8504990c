import io

import numpy as np
import pytest

from pspt.generators import MODELS, generate, grid, line, preferential_attachment
from pspt.graph import write_edge_list


def dump(g) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def test_line_of_five():
    g = line(5)
    assert g.edge_count == 4
    u, v, _ = g.edge_arrays()
    assert list(zip(u.tolist(), v.tolist())) == [(0, 1), (1, 2), (2, 3), (3, 4)]


def test_pa_edge_count():
    g = preferential_attachment(1000, 3, seed=0)
    assert g.node_count == 1000
    assert g.edge_count == 2991
    assert g.degree.min() >= 3


@pytest.mark.parametrize("n,m", [(10, 1), (50, 4), (300, 7)])
def test_pa_edge_count_formula(n, m):
    assert preferential_attachment(n, m, seed=n).edge_count == m * (n - m)


def test_grid_shape():
    g = grid(3, 4)
    assert g.node_count == 12
    assert g.edge_count == 3 * 3 + 2 * 4


@pytest.mark.parametrize("model,params", [
    ("pa", {"n": 200, "m": 2}), ("er", {"n": 100, "p": 0.05}),
    ("line", {"n": 30}), ("grid", {"rows": 5, "cols": 6}),
])
def test_same_seed_same_bytes(model, params):
    a = dump(generate(model, seed=3, max_weight=9, **params))
    b = dump(generate(model, seed=3, max_weight=9, **params))
    assert a == b
    assert set(MODELS) == {"pa", "er", "line", "grid"}


def test_weights_in_range():
    g = preferential_attachment(500, 2, seed=1, max_weight=6)
    assert g.weights.min() >= 1 and g.weights.max() <= 6
    assert np.all(g.weights == np.round(g.weights))


def test_bad_parameters():
    with pytest.raises(ValueError):
        preferential_attachment(3, 3)
    with pytest.raises(ValueError):
        generate("er", n=10, p=1.5)
    with pytest.raises(ValueError):
        generate("ring", n=10)
