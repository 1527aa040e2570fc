"""Oblivious sketch builders: structure, moments, parameter defaults."""

import math
import warnings

import numpy as np
import pytest

from subsketch import (
    IndependentFamily,
    ParameterError,
    SketchSpec,
    build_dense_baseline,
    build_ose_ie,
    build_osnap,
    default_parameters,
    independence_degree,
    osnap_sparsity_target,
)


def osnap_spec(m, n, s, seed=0, degree_k=8):
    return SketchSpec.from_sparsity("osnap", m=m, n=n, s=s, seed=seed, degree_k=degree_k)


class TestSpecValidation:
    def test_s_must_divide_m(self):
        with pytest.raises(ParameterError):
            SketchSpec(kind="osnap", m=4, n=3, p=3 / 4)

    def test_s_must_be_integral(self):
        with pytest.raises(ParameterError):
            SketchSpec(kind="osnap", m=10, n=3, p=0.33)

    def test_p_bounds(self):
        with pytest.raises(ParameterError):
            SketchSpec(kind="ose-ie", m=4, n=4, p=0.0)
        with pytest.raises(ParameterError):
            SketchSpec(kind="ose-ie", m=4, n=4, p=1.5)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            SketchSpec(kind="fft", m=4, n=4, p=0.5)


class TestOsnapStructure:
    def test_one_entry_per_block(self):
        spec = osnap_spec(m=4, n=3, s=2, seed=5)
        sk = build_osnap(spec)
        assert sk.nnz == 6
        for j in range(3):
            rows = sk.rows[sk.indptr[j]:sk.indptr[j + 1]]
            assert rows[0] in (0, 1) and rows[1] in (2, 3)
        assert np.all(np.abs(sk.values) == 1.0)
        dense = sk.materialize()
        nz = dense[dense != 0]
        np.testing.assert_allclose(np.abs(nz), 1 / math.sqrt(2))

    def test_column_energy_exactly_pm(self):
        spec = osnap_spec(m=24, n=17, s=6, seed=2)
        sk = build_osnap(spec)
        assert np.all(sk.column_energy() == 6.0)

    def test_determinism(self):
        spec = osnap_spec(m=32, n=11, s=4, seed=99)
        a, b = build_osnap(spec), build_osnap(spec)
        assert np.array_equal(a.rows, b.rows)
        assert np.array_equal(a.values, b.values)

    def test_p_one_dense_column(self):
        spec = osnap_spec(m=6, n=4, s=6, seed=1)
        sk = build_osnap(spec)
        for j in range(4):
            assert np.array_equal(sk.rows[sk.indptr[j]:sk.indptr[j + 1]], np.arange(6))

    def test_rows_strictly_increasing(self):
        spec = osnap_spec(m=64, n=40, s=8, seed=3)
        sk = build_osnap(spec)
        for j in range(40):
            rows = sk.rows[sk.indptr[j]:sk.indptr[j + 1]]
            assert np.all(np.diff(rows) > 0)

    def test_wrong_kind_rejected(self):
        spec = SketchSpec(kind="ose-ie", m=4, n=4, p=0.5)
        with pytest.raises(ParameterError):
            build_osnap(spec)


class TestOseIe:
    def test_p_one_is_dense_rademacher(self):
        spec = SketchSpec(kind="ose-ie", m=8, n=6, p=1.0, seed=4, family="independent")
        sk = build_ose_ie(spec)
        assert sk.nnz == 48
        assert np.all(np.abs(sk.values) == 1.0)

    def test_column_counts_binomial(self):
        # one long column, repeated builds: mean count within 4 SE
        trials, m, p = 400, 400, 0.25
        counts = np.empty(trials)
        for t in range(trials):
            spec = SketchSpec(kind="ose-ie", m=m, n=1, p=p, seed=t, family="independent")
            counts[t] = build_ose_ie(spec).nnz
        se = math.sqrt(m * p * (1 - p) / trials)
        assert abs(counts.mean() - 100) <= 4 * se

    def test_scan_and_gap_paths_distributionally_equal(self):
        # same first two moments of per-entry values on a tiny grid
        m, n, p, reps = 6, 5, 0.3, 3000
        sums = {"kwise": np.zeros((m, n)), "independent": np.zeros((m, n))}
        sqs = {"kwise": np.zeros((m, n)), "independent": np.zeros((m, n))}
        for fam in ("kwise", "independent"):
            for t in range(reps):
                spec = SketchSpec(kind="ose-ie", m=m, n=n, p=p, seed=t,
                                  family=fam, degree_k=8)
                dense = build_ose_ie(spec).materialize() * math.sqrt(p * m)
                sums[fam] += dense
                sqs[fam] += dense**2
        se = 4 * math.sqrt(p / reps)
        for fam in ("kwise", "independent"):
            assert np.all(np.abs(sums[fam] / reps) <= se)
            assert np.all(np.abs(sqs[fam] / reps - p) <= 4 * math.sqrt(2 * p / reps))

    def test_entry_moments(self):
        # mean 0, variance p over 1e5 sampled entries
        m, n, p = 20, 50, 0.2
        vals = []
        for t in range(120):
            spec = SketchSpec(kind="ose-ie", m=m, n=n, p=p, seed=1000 + t,
                              family="independent")
            vals.append(build_ose_ie(spec).materialize() * math.sqrt(p * m))
        vals = np.stack(vals)
        N = vals.size
        assert N >= 100_000
        assert abs(vals.mean()) <= 4 * math.sqrt(p / N)
        assert abs((vals**2).mean() - p) <= 4 * math.sqrt(2 * p / N)


class TestDenseBaselines:
    def test_gaussian_unit_variance(self):
        spec = SketchSpec(kind="gaussian-dense", m=100, n=100, p=1.0, seed=8,
                          family="independent")
        sk = build_dense_baseline(spec)
        entries = sk.matrix.ravel()
        assert entries.size == 10_000
        assert abs(entries.mean()) <= 4 / math.sqrt(entries.size)
        assert abs(entries.var() - 1.0) <= 4 * math.sqrt(2.0 / entries.size)

    def test_rademacher_magnitude(self):
        spec = SketchSpec(kind="rademacher-dense", m=16, n=10, p=0.25, seed=3,
                          family="independent")
        sk = build_dense_baseline(spec)
        np.testing.assert_allclose(np.abs(sk.matrix), 0.5)

    def test_kwise_and_independent_both_work(self):
        for fam in ("kwise", "independent"):
            spec = SketchSpec(kind="gaussian-dense", m=50, n=40, p=1.0, seed=5,
                              family=fam)
            sk = build_dense_baseline(spec)
            assert np.isfinite(sk.matrix).all()


class TestDefaultParameters:
    def test_example_arithmetic(self):
        # d=16, eps=0.5, delta=0.01, C_m=16: m0 = ceil(16*(16+ln 100)/0.25)
        spec = default_parameters(16, 4096, 0.5, 0.01, "osnap", c_m=16)
        m0 = math.ceil(16 * (16 + math.log(100)) / 0.25)
        assert spec.m >= m0
        assert spec.m % spec.s == 0
        assert spec.m - m0 < spec.s  # rounded up by less than one block row set

    def test_cap_rule_p_one(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spec = default_parameters(4, 64, 0.02, 0.5, "osnap", c_m=0.001)
        assert spec.p == 1.0
        assert spec.s == spec.m

    def test_sparsity_grows_linearly_in_inverse_eps(self):
        s1 = osnap_sparsity_target(16, 0.5, 0.05)
        s2 = osnap_sparsity_target(16, 0.25, 0.05)
        assert 1.5 <= s2 / s1 <= 2.5

    def test_oseie_includes_extra_term(self):
        osnap = default_parameters(16, 8192, 0.25, 0.05, "osnap")
        oseie = default_parameters(16, 8192, 0.25, 0.05, "ose-ie")
        assert oseie.s > osnap.s

    def test_degree_formula(self):
        assert independence_degree(16, 0.5, 0.05, 22) == 8 * math.ceil(math.log(640))
        spec = default_parameters(16, 4096, 0.5, 0.05, "osnap")
        assert spec.degree_k == independence_degree(16, 0.5, 0.05, spec.s)

    def test_invalid_inputs(self):
        with pytest.raises(ParameterError):
            default_parameters(16, 4096, 1.5, 0.05, "osnap")
        with pytest.raises(ParameterError):
            default_parameters(16, 8, 0.5, 0.05, "osnap")  # d > n
