"""Application kernel: dense-oracle equivalence, linearity, IO round trips."""

import math

import numpy as np
import pytest
import scipy.sparse

from subsketch import (
    FormatError,
    LessIcSpec,
    LeverageScores,
    ParameterError,
    SketchSpec,
    SparseSketch,
    apply,
    apply_to_vector,
    build_less_ic,
    build_ose_ie,
    build_osnap,
    load_matrix,
    load_sketch,
    materialize_dense,
    save_matrix,
    sketch_from_dense,
)


def random_sketch(kind, rng, m, n, seed):
    if kind == "osnap":
        divisors = [s for s in range(1, m + 1) if m % s == 0]
        s = int(rng.choice(divisors))
        return build_osnap(SketchSpec.from_sparsity("osnap", m=m, n=n, s=s, seed=seed))
    if kind == "ose-ie":
        p = float(rng.uniform(0.05, 0.9))
        return build_ose_ie(SketchSpec(kind="ose-ie", m=m, n=n, p=p, seed=seed,
                                       family="independent"))
    z = np.clip(rng.uniform(0.0, 1.0, n), 0.0, 1.0)
    p = float(rng.uniform(2.0 / m, 0.5))
    spec = LessIcSpec(m=m, p=p, scores=LeverageScores(z=z), seed=seed)
    return build_less_ic(spec)


class TestOracleEquivalence:
    @pytest.mark.parametrize("kind", ["osnap", "ose-ie", "less-ic"])
    def test_apply_matches_dense_multiply(self, kind):
        rng = np.random.default_rng(hash(kind) % 2**32)
        for trial in range(6):
            m = int(rng.integers(4, 64))
            n = int(rng.integers(m, 256))
            d = int(rng.integers(1, 16))
            sk = random_sketch(kind, rng, m, n, seed=trial)
            A = rng.standard_normal((n, d))
            got = apply(sk, A)
            want = materialize_dense(sk) @ A
            err = np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-30)
            assert err <= 1e-12

    def test_sparse_input_matches_dense_input(self):
        rng = np.random.default_rng(1)
        sk = random_sketch("osnap", rng, 32, 200, seed=9)
        A = scipy.sparse.random(200, 8, density=0.1, random_state=2, format="csr")
        np.testing.assert_allclose(apply(sk, A), apply(sk, A.toarray()), atol=1e-14)

    def test_zero_matrix(self):
        rng = np.random.default_rng(2)
        sk = random_sketch("osnap", rng, 16, 64, seed=3)
        assert np.all(apply(sk, np.zeros((64, 5))) == 0)

    def test_signed_permutation_pattern(self):
        # hand-built sketch with one +-1 per column at row j
        m = n = 6
        signs = np.array([1.0, -1.0, 1.0, 1.0, -1.0, -1.0])
        spec = SketchSpec.from_sparsity("osnap", m=m, n=n, s=1, seed=0)
        sk = SparseSketch(spec=spec, indptr=np.arange(n + 1),
                          rows=np.arange(n), values=signs, scale=1.0)
        A = np.random.default_rng(4).standard_normal((n, 3))
        np.testing.assert_allclose(apply(sk, A), signs[:, None] * A)

    def test_linearity(self):
        rng = np.random.default_rng(5)
        sk = random_sketch("less-ic", rng, 24, 100, seed=6)
        A = rng.standard_normal((100, 6))
        C = rng.standard_normal((6, 6))
        lhs = apply(sk, A @ C)
        rhs = apply(sk, A) @ C
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) <= 1e-12

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(6)
        sk = random_sketch("osnap", rng, 8, 32, seed=1)
        with pytest.raises(ParameterError):
            apply(sk, np.ones((33, 2)))


class TestVectorApply:
    def test_basis_vector_picks_column(self):
        rng = np.random.default_rng(7)
        sk = random_sketch("osnap", rng, 16, 50, seed=2)
        dense = materialize_dense(sk)
        for j in (0, 17, 49):
            e = np.zeros(50)
            e[j] = 1.0
            np.testing.assert_allclose(apply_to_vector(sk, e), dense[:, j])

    def test_additivity(self):
        rng = np.random.default_rng(8)
        sk = random_sketch("ose-ie", rng, 16, 50, seed=3)
        x = np.zeros(50)
        x[4] = 1.0
        x[31] = 1.0
        dense = materialize_dense(sk)
        np.testing.assert_allclose(apply_to_vector(sk, x), dense[:, 4] + dense[:, 31])

    def test_random_vector_oracle(self):
        rng = np.random.default_rng(9)
        sk = random_sketch("less-ic", rng, 20, 80, seed=4)
        x = rng.standard_normal(80)
        want = materialize_dense(sk) @ x
        got = apply_to_vector(sk, x)
        assert np.linalg.norm(got - want) / np.linalg.norm(want) <= 1e-12

    def test_matrix_rejected(self):
        rng = np.random.default_rng(10)
        sk = random_sketch("osnap", rng, 8, 32, seed=5)
        with pytest.raises(ParameterError):
            apply_to_vector(sk, np.ones((32, 2)))


class TestMaterialize:
    def test_osnap_entry_count_and_magnitude(self):
        spec = SketchSpec.from_sparsity("osnap", m=4, n=3, s=2, seed=7)
        dense = materialize_dense(build_osnap(spec))
        assert np.count_nonzero(dense) == 6
        np.testing.assert_allclose(np.abs(dense[dense != 0]), 1 / math.sqrt(2))

    def test_column_norms_are_one(self):
        spec = SketchSpec.from_sparsity("osnap", m=64, n=20, s=8, seed=8)
        dense = materialize_dense(build_osnap(spec))
        np.testing.assert_allclose(np.linalg.norm(dense, axis=0), 1.0, rtol=1e-12)

    def test_roundtrip_through_dense(self):
        rng = np.random.default_rng(11)
        sk = random_sketch("less-ic", rng, 24, 60, seed=9)
        back = sketch_from_dense(materialize_dense(sk), sk.scale, sk.spec)
        assert np.array_equal(back.indptr, sk.indptr)
        assert np.array_equal(back.rows, sk.rows)
        np.testing.assert_allclose(back.values, sk.values, rtol=1e-12)

    def test_memory_cap(self):
        spec = SketchSpec.from_sparsity("osnap", m=1000, n=1000, s=1, seed=0)
        sk = build_osnap(spec)
        with pytest.raises(ParameterError):
            materialize_dense(sk, max_entries=10_000)


class TestMatrixMarketIO:
    def test_dense_roundtrip(self, tmp_path):
        rng = np.random.default_rng(12)
        A = rng.standard_normal((7, 3))
        path = tmp_path / "a.mtx"
        save_matrix(path, A)
        np.testing.assert_array_equal(load_matrix(path), A)

    def test_sparse_roundtrip(self, tmp_path):
        A = scipy.sparse.random(40, 5, density=0.2, random_state=1, format="csr")
        path = tmp_path / "s.mtx"
        save_matrix(path, A)
        B = load_matrix(path)
        assert scipy.sparse.issparse(B)
        np.testing.assert_allclose(B.toarray(), A.toarray())

    def test_parse_error(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n1 1 oops\n")
        with pytest.raises(FormatError):
            load_matrix(path)


class TestSketchFileFormat:
    @pytest.mark.parametrize("kind", ["osnap", "less-ic"])
    def test_roundtrip(self, tmp_path, kind):
        rng = np.random.default_rng(13)
        sk = random_sketch(kind, rng, 32, 100, seed=21)
        path = tmp_path / "s.skt"
        sk.save(path)
        back = load_sketch(path)
        assert back.spec.kind == sk.spec.kind
        assert back.spec.m == sk.m and back.spec.n == sk.n
        assert back.scale == sk.scale
        assert np.array_equal(back.indptr, sk.indptr)
        assert np.array_equal(back.rows, sk.rows)
        assert np.array_equal(back.values, sk.values)

    def test_less_header_carries_betas_and_digest(self, tmp_path):
        rng = np.random.default_rng(14)
        sk = random_sketch("less-ic", rng, 16, 40, seed=5)
        path = tmp_path / "s.skt"
        sk.save(path)
        back = load_sketch(path)
        assert back.spec.extras["beta1"] == sk.spec.scores.beta1
        assert back.spec.extras["scores_sha256"] == sk.spec.scores.digest()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.skt"
        path.write_bytes(b"NOTASKCH" + b"\x00" * 64)
        with pytest.raises(FormatError):
            load_sketch(path)

    def test_applied_result_matches_after_reload(self, tmp_path):
        rng = np.random.default_rng(15)
        sk = random_sketch("osnap", rng, 24, 80, seed=6)
        A = rng.standard_normal((80, 4))
        path = tmp_path / "s.skt"
        sk.save(path)
        np.testing.assert_array_equal(apply(load_sketch(path), A), apply(sk, A))
