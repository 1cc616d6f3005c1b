import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from elqadash.errors import BadK, BadParam, UnknownMethod
from elqadash.miners import (
    PointMatrix,
    analyse,
    dbscan,
    kmeans,
    kmeans_single,
    standardize,
)


def matrix(rows, ids=None):
    rows = np.asarray(rows, dtype=float)
    ids = ids or [f"m{i}" for i in range(rows.shape[0])]
    return PointMatrix(ids=ids, rows=rows)


def random_matrix(rnd, n, d=2, scale=10.0):
    return matrix([[rnd.uniform(-scale, scale) for _ in range(d)] for _ in range(n)])


class TestPointMatrix:
    def test_rejects_ragged(self):
        with pytest.raises(ValueError):
            PointMatrix(ids=["a"], rows=[[1, 2], [3]])

    def test_rejects_duplicate_ids(self):
        with pytest.raises(ValueError):
            matrix([[0], [1]], ids=["x", "x"])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            matrix([[np.nan]])


class TestStandardize:
    def test_zero_variance_column(self):
        out = standardize(matrix([[1], [1], [1]]))
        assert np.array_equal(out.rows, np.zeros((3, 1)))

    def test_two_point_column(self):
        out = standardize(matrix([[0], [2]]))
        assert np.array_equal(out.rows, [[-1], [1]])

    def test_recomputation_oracle(self):
        rnd = random.Random(0)
        for _ in range(20):
            m = random_matrix(rnd, rnd.randint(2, 30), d=rnd.randint(1, 4))
            out = standardize(m)
            for j in range(m.d):
                col = out.rows[:, j]
                src = m.rows[:, j]
                if np.std(src) == 0:
                    assert np.all(col == 0)
                else:
                    assert abs(col.mean()) < 1e-9
                    assert abs(col.std() - 1.0) < 1e-9


class TestKmeans:
    def test_k_equals_n(self):
        m = matrix([[0, 0], [5, 5], [9, 1]])
        out = kmeans(m, k=3, restarts=3)
        assert sorted(out.labels) == [0, 1, 2]
        assert out.inertia == pytest.approx(0.0, abs=1e-30)

    def test_k_one(self):
        m = matrix([[0, 0], [2, 2], [4, 4]])
        out = kmeans(m, k=1)
        assert out.labels == [0, 0, 0]
        assert np.allclose(out.centroids[0], [2, 2])
        # inertia equals n * total per-column population variance
        want = m.rows.shape[0] * float(np.sum(np.var(m.rows, axis=0)))
        assert out.inertia == pytest.approx(want, rel=1e-12)

    def test_two_obvious_groups(self):
        m = matrix([[0, 0], [0, 1], [10, 0], [10, 1]])
        out = kmeans(m, k=2, restarts=10)
        assert out.labels[0] == out.labels[1]
        assert out.labels[2] == out.labels[3]
        assert out.labels[0] != out.labels[2]
        assert out.inertia == pytest.approx(1.0, rel=1e-12)
        assert out.inertia == pytest.approx(oracles.best_two_partition_inertia(m.rows.tolist()), rel=1e-12)

    def test_bad_k(self):
        m = matrix([[0], [1]])
        for k in (0, 3, -1):
            with pytest.raises(BadK):
                kmeans(m, k=k)

    def test_bad_tol(self):
        with pytest.raises(BadParam):
            kmeans(matrix([[0], [1]]), k=1, tol=0)

    def test_deterministic_bits(self):
        rnd = random.Random(5)
        m = random_matrix(rnd, 40, d=3)
        a = kmeans(m, k=4, seed=9, restarts=5)
        b = kmeans(m, k=4, seed=9, restarts=5)
        assert a.labels == b.labels
        assert a.inertia == b.inertia
        assert np.array_equal(a.centroids, b.centroids)
        assert a.iterations == b.iterations

    def test_inertia_history_non_increasing(self):
        rnd = random.Random(6)
        for trial in range(20):
            m = random_matrix(rnd, rnd.randint(5, 40), d=2)
            _, history = kmeans_single(m, k=min(4, m.n), seed=trial)
            for earlier, later in zip(history, history[1:]):
                assert later <= earlier + 1e-12

    def test_final_labels_are_argmin(self):
        rnd = random.Random(7)
        for trial in range(20):
            m = random_matrix(rnd, rnd.randint(4, 30), d=2)
            out, _ = kmeans_single(m, k=3 if m.n >= 3 else 1, seed=trial)
            d = ((m.rows[:, None, :] - out.centroids[None, :, :]) ** 2).sum(axis=2)
            assert out.labels == [int(x) for x in np.argmin(d, axis=1)]

    def test_permutation_equivariance_with_fixed_init(self):
        rnd = random.Random(8)
        m = random_matrix(rnd, 12, d=2)
        init_ids = ["m1", "m7", "m9"]
        perm = list(range(12))
        rnd.shuffle(perm)
        shuffled = PointMatrix(ids=[m.ids[i] for i in perm], rows=m.rows[perm])

        def partition(pm):
            init = [pm.ids.index(x) for x in init_ids]
            out, _ = kmeans_single(pm, k=3, init_indices=init)
            groups = {}
            for mid, label in zip(pm.ids, out.labels):
                groups.setdefault(label, set()).add(mid)
            return sorted(map(frozenset, groups.values()), key=sorted)

        assert partition(m) == partition(shuffled)

    def test_restarts_pick_min_inertia(self):
        rnd = random.Random(9)
        m = random_matrix(rnd, 25, d=2)
        best = kmeans(m, k=3, seed=0, restarts=8)
        singles = [kmeans_single(m, k=3, seed=s)[0].inertia for s in range(8)]
        assert best.inertia == min(singles)


class TestDbscan:
    def test_line_one_cluster(self):
        m = matrix([[0.0], [1.0], [2.0]])
        out = dbscan(m, eps=1.5, min_pts=2)
        assert out.labels == [0, 0, 0]

    def test_isolated_point_is_noise(self):
        m = matrix([[0, 0], [0.5, 0], [100, 100]])
        out = dbscan(m, eps=1.0, min_pts=2)
        assert out.labels[2] == -1
        assert out.labels[0] == out.labels[1] == 0

    def test_two_far_groups_id_order(self):
        m = matrix([[0], [0.1], [0.2], [1000], [1000.1], [1000.2]])
        out = dbscan(m, eps=0.5, min_pts=2)
        assert out.labels == [0, 0, 0, 1, 1, 1]

    def test_bad_params(self):
        m = matrix([[0]])
        with pytest.raises(BadParam):
            dbscan(m, eps=0, min_pts=1)
        with pytest.raises(BadParam):
            dbscan(m, eps=1.0, min_pts=0)

    def test_naive_reference_random_instances(self):
        rnd = random.Random(10)
        for _ in range(60):
            n = rnd.randint(1, 40)
            m = random_matrix(rnd, n, d=rnd.choice([1, 2, 3]), scale=5.0)
            eps = rnd.uniform(0.2, 4.0)
            min_pts = rnd.randint(1, 6)
            got = oracles.canonical_labels(dbscan(m, eps=eps, min_pts=min_pts).labels)
            want = oracles.canonical_labels(
                oracles.dbscan_reference(m.rows.tolist(), eps, min_pts)
            )
            assert got == want

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_core_and_noise_sets_row_order_independent(self, seed):
        rnd = random.Random(seed)
        n = rnd.randint(2, 25)
        m = random_matrix(rnd, n, d=2, scale=3.0)
        eps = rnd.uniform(0.3, 3.0)
        min_pts = rnd.randint(1, 5)
        base = dbscan(m, eps=eps, min_pts=min_pts).labels
        perm = list(range(n))
        rnd.shuffle(perm)
        shuffled = PointMatrix(ids=[m.ids[i] for i in perm], rows=m.rows[perm])
        permuted = dbscan(shuffled, eps=eps, min_pts=min_pts).labels
        noise_base = {m.ids[i] for i, l in enumerate(base) if l == -1}
        noise_perm = {shuffled.ids[i] for i, l in enumerate(permuted) if l == -1}
        assert noise_base == noise_perm


class TestAnalyse:
    def test_kmeans_dispatch_identity(self):
        rnd = random.Random(11)
        m = random_matrix(rnd, 10)
        via = analyse(m, {"method": "kmeans", "params": {"k": 1}})
        direct = kmeans(m, k=1)
        assert via.labels == direct.labels
        assert via.inertia == direct.inertia

    def test_dbscan_dispatch_identity(self):
        m = matrix([[0.0], [1.0], [2.0]])
        via = analyse(m, {"method": "dbscan", "eps": 1.5, "min_pts": 2})
        assert via.labels == dbscan(m, eps=1.5, min_pts=2).labels

    def test_unknown_method(self):
        with pytest.raises(UnknownMethod):
            analyse(matrix([[0]]), {"method": "lstm"})

    def test_registered_extension_dispatches(self):
        from elqadash.miners import ClusterAssignment, register_analyser, _ANALYSERS

        def trivial(m, **params):
            return ClusterAssignment(labels=[0] * m.n)

        register_analyser("trivial", trivial)
        try:
            out = analyse(matrix([[0], [1]]), {"method": "trivial"})
            assert out.labels == [0, 0]
        finally:
            del _ANALYSERS["trivial"]
