"""Smoke test for the dcsbm_py extension module.

Build and install first, for example with
``pip install --no-build-isolation ./crates/dcsbm-py`` (maturin backend),
then run ``python python/smoke_test.py`` or ``pytest python/``.
"""

import os
import tempfile

import dcsbm_py


def test_params_round_trip():
    p = dcsbm_py.Params([0.5, 0.5], [[5.0, 1.0], [1.0, 5.0]], [3.0] * 200)
    assert p.n == 200 and p.k == 2
    assert p.sigma[:3] == [0, 0, 0] and p.sigma[-1] == 1
    assert p.violations() == []
    agg = p.aggregates()
    assert abs(agg["d_bar"] - 3.0) < 1e-12


def test_sampling_is_deterministic():
    p = dcsbm_py.Params.preset("eppm", 400)
    a, b = p.sample(7), p.sample(7)
    assert a.edges == b.edges
    assert a.edges != p.sample(8).edges


def test_baselines_and_metrics():
    g, truth, params = dcsbm_py.preset_instance("eppm", 600, seed=2)
    assert params is not None and len(truth) == g.n
    labels = dcsbm_py.score_cluster(g, 2)
    fraction, errors = dcsbm_py.misclassification(labels, truth)
    assert errors == 0 and fraction == 0.0
    values, vectors = dcsbm_py.eigenpairs(g, 2)
    assert len(values) == 2 and len(vectors[0]) == g.n
    assert abs(values[0] * g.average_degree() - 1.0) < 0.2


def test_detection_summary():
    g, _, _ = dcsbm_py.preset_instance("eppm", 400, seed=1)
    d = dcsbm_py.detect_communities(g, seed=3)
    assert d.l_hat >= 1
    assert len(d.labels) == g.n
    assert sum(d.sizes) + sum(x is None for x in d.labels) == g.n


def test_errors_map_to_python_exceptions():
    g = dcsbm_py.Graph(3, [(0, 1), (1, 2)])
    try:
        dcsbm_py.adjacency_spectral(g, 9)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
    try:
        dcsbm_py.Graph.read_edge_list("/nonexistent/graph.edges")
    except OSError:
        pass
    else:
        raise AssertionError("expected OSError")
    assert issubclass(dcsbm_py.ConvergenceError, RuntimeError)


def test_label_files():
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "x.labels")
        dcsbm_py.write_labels(path, [0, None, 1])
        assert dcsbm_py.read_labels(path) == [0, None, 1]


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
