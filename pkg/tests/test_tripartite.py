import math

import numpy as np
import pytest

from ergotropy.errors import ValidationError
from ergotropy.passive import passive_energy
from ergotropy.qcore import (
    DensityMatrix,
    Hamiltonian,
    PureState,
    local_sum,
    partial_trace,
    random_pure,
    random_unitary,
)
from ergotropy.tripartite import (
    ClassLabel,
    classify,
    cut_gap,
    dephased_gap,
    gap_signature,
    make_bisep,
    make_ghz,
    make_w,
    marginal_bases,
    monogamy_decompose,
)

KETS = {format(i, "03b"): i for i in range(8)}


def random_bases(rng):
    return [random_unitary(2, rng) for _ in range(3)]


def ordered_weights(rng, lam1_at_least_half):
    while True:
        lam = np.sort(rng.dirichlet(np.ones(3)))[::-1]
        if (lam[0] >= 0.5) == lam1_at_least_half:
            return lam


class TestConstructors:
    def test_standard_ghz(self):
        v = make_ghz(0.5).amplitudes
        expected = np.zeros(8)
        expected[KETS["000"]] = expected[KETS["111"]] = 1 / math.sqrt(2)
        np.testing.assert_allclose(v, expected, atol=1e-15)

    def test_symmetric_w(self):
        v = make_w(1 / 3, 1 / 3, 1 / 3).amplitudes
        expected = np.zeros(8)
        for k in ("001", "010", "100"):
            expected[KETS[k]] = 1 / math.sqrt(3)
        np.testing.assert_allclose(v, expected, atol=1e-15)

    def test_bisep_product_limit(self):
        v = make_bisep(0.0).amplitudes
        assert abs(abs(v[KETS["110"]]) - 1) <= 1e-15

    def test_bisep_pairs(self):
        for pair, k in (("AB", "110"), ("AC", "101"), ("BC", "011")):
            v = make_bisep(0.25, pair).amplitudes
            assert v[KETS["000"]] == pytest.approx(0.5)
            assert v[KETS[k]] == pytest.approx(math.sqrt(0.75))

    def test_normalised_in_random_bases(self, rng):
        for _ in range(20):
            b = random_bases(rng)
            for psi in (make_ghz(0.7, 1.0, b), make_w(0.5, 0.3, 0.2, 0.4, 2.0, b), make_bisep(0.2, "AC", b)):
                assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_invalid_weights(self):
        with pytest.raises(ValidationError):
            make_w(0.2, 0.3, 0.5)
        with pytest.raises(ValidationError):
            make_w(0.5, 0.5, 0.5)
        with pytest.raises(ValidationError):
            make_ghz(0.3)
        with pytest.raises(ValidationError):
            make_bisep(0.7)
        with pytest.raises(ValidationError):
            make_bisep(0.2, "CA")
        with pytest.raises(ValidationError):
            make_ghz(0.6, bases=[np.eye(2), np.ones((2, 2)), np.eye(2)])


class TestTable:
    """Each family over 50 random parameterisations in random local bases."""

    def check(self, psi, expected):
        np.testing.assert_allclose(gap_signature(psi).as_tuple(), expected, atol=1e-9)

    def test_ghz(self, rng):
        for _ in range(50):
            lam = rng.uniform(0.5, 1.0)
            self.check(make_ghz(lam, rng.uniform(0, 2 * np.pi), random_bases(rng)), [2 * (1 - lam)] * 3)

    def test_w_large_first_weight(self, rng):
        for _ in range(50):
            l1, l2, l3 = ordered_weights(rng, True)
            psi = make_w(l1, l2, l3, *rng.uniform(0, 2 * np.pi, 2), random_bases(rng))
            self.check(psi, [2 * l3, 2 * l2, 2 * (l2 + l3)])

    def test_w_small_first_weight(self, rng):
        for _ in range(50):
            l1, l2, l3 = ordered_weights(rng, False)
            psi = make_w(l1, l2, l3, *rng.uniform(0, 2 * np.pi, 2), random_bases(rng))
            self.check(psi, [2 * l3, 2 * l2, 2 * l1])

    @pytest.mark.parametrize("pair,zero", [("AB", 2), ("AC", 1), ("BC", 0)])
    def test_biseparable(self, rng, pair, zero):
        for _ in range(50):
            p = rng.uniform(0, 0.5)
            expected = [2 * p] * 3
            expected[zero] = 0.0
            self.check(make_bisep(p, pair, random_bases(rng)), expected)

    def test_product(self, rng):
        for _ in range(50):
            self.check(make_bisep(0.0, "AB", random_bases(rng)), [0, 0, 0])

    def test_boundary_rows_agree(self):
        sig = gap_signature(make_w(0.5, 0.3, 0.2)).as_tuple()
        np.testing.assert_allclose(sig, [0.4, 0.6, 1.0], atol=1e-12)


class TestDephasedGap:
    def test_symmetric_w(self):
        psi = make_w(1 / 3, 1 / 3, 1 / 3)
        assert dephased_gap(psi) == pytest.approx(1 / 3, abs=1e-10)
        assert dephased_gap(psi, bases=[np.eye(2)] * 3) == pytest.approx(1 / 3, abs=1e-10)

    def test_ghz_two_thirds(self):
        assert dephased_gap(make_ghz(2 / 3)) == pytest.approx(2 / 3, abs=1e-10)

    def test_own_basis_recovered(self, rng):
        b = random_bases(rng)
        assert dephased_gap(make_w(1 / 3, 1 / 3, 1 / 3, 0.3, 1.1, b)) == pytest.approx(1 / 3, abs=1e-10)
        assert dephased_gap(make_ghz(2 / 3, 0.8, b)) == pytest.approx(2 / 3, abs=1e-10)

    def test_product_diagonal_state(self):
        for bits in range(8):
            rho = DensityMatrix.from_diagonal(np.eye(8)[bits], (2, 2, 2))
            assert abs(dephased_gap(rho, bases=[np.eye(2)] * 3)) <= 1e-12
        same = np.kron(np.kron([0.7, 0.3], [0.7, 0.3]), [0.7, 0.3])
        assert abs(dephased_gap(DensityMatrix.from_diagonal(same, (2, 2, 2)), bases=[np.eye(2)] * 3)) <= 1e-12

    def test_mixed_product_against_sorting_oracle(self):
        # unequal marginals can invert weights across levels, so the gap is positive
        marg = ([0.7, 0.3], [0.6, 0.4], [0.9, 0.1])
        w = np.kron(np.kron(marg[0], marg[1]), marg[2])
        levels = np.array([bin(i).count("1") for i in range(8)])
        expected = sum(m[1] for m in marg) - float(np.dot(np.sort(w)[::-1], np.sort(levels)))
        rho = DensityMatrix.from_diagonal(w, (2, 2, 2))
        assert dephased_gap(rho, bases=[np.eye(2)] * 3) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.066, abs=1e-12)

    def test_nonnegative(self, rng):
        for _ in range(50):
            psi = random_pure((2, 2, 2), rng)
            assert dephased_gap(psi, bases=random_bases(rng)) >= -1e-10

    def test_degenerate_marginals_need_bases(self):
        with pytest.raises(ValidationError):
            dephased_gap(make_ghz(0.5))
        assert marginal_bases(make_ghz(0.5)) is None


class TestClassify:
    def test_ghz_vs_symmetric_w(self):
        ghz, w = make_ghz(2 / 3), make_w(1 / 3, 1 / 3, 1 / 3)
        np.testing.assert_allclose(gap_signature(ghz).as_tuple(), gap_signature(w).as_tuple(), atol=1e-12)
        c_ghz, c_w = classify(ghz), classify(w)
        assert c_ghz.label is ClassLabel.GHZ and c_ghz.dephased_gap == pytest.approx(2 / 3)
        assert c_w.label is ClassLabel.W and c_w.dephased_gap == pytest.approx(1 / 3)

    def test_biseparable_labels(self, rng):
        expected = {"AB": ClassLabel.BISEP_AB_C, "AC": ClassLabel.BISEP_AC_B, "BC": ClassLabel.BISEP_BC_A}
        for pair, label in expected.items():
            assert classify(make_bisep(0.3, pair, random_bases(rng))).label is label

    def test_product(self):
        c = classify(make_bisep(0.0))
        assert c.label is ClassLabel.PRODUCT
        assert c.to_dict()["label"] == "Product"

    def test_families_in_random_bases(self, rng):
        for _ in range(30):
            b = random_bases(rng)
            assert classify(make_ghz(rng.uniform(0.55, 0.95), rng.uniform(0, 6), b)).label is ClassLabel.GHZ
            l1, l2, l3 = ordered_weights(rng, bool(rng.integers(2)))
            assert classify(make_w(l1, l2, l3, 0.2, 0.9, b)).label is ClassLabel.W

    def test_maximally_mixed_marginals_ambiguous(self):
        c = classify(make_ghz(0.5))
        assert c.label is ClassLabel.AMBIGUOUS
        assert classify(make_ghz(0.5), bases=[np.eye(2)] * 3).label is ClassLabel.GHZ

    def test_requires_qubits(self, rng):
        with pytest.raises(ValidationError):
            classify(random_pure((2, 2, 3), rng))


class TestMonogamy:
    def test_three_qubit_equality(self, rng):
        for _ in range(500):
            t = monogamy_decompose(random_pure((2, 2, 2), rng))
            assert abs(t.slack) <= 1e-9

    def test_w_with_large_middle_weight(self, rng):
        for _ in range(20):
            l2 = rng.uniform(0.5, 1.0)
            l1 = rng.uniform(0, 1 - l2)
            t = monogamy_decompose(make_w(l1, l2, 1 - l1 - l2, ordered=False))
            assert abs(t.gap_A_C) <= 1e-10
            assert t.gap_A_BC == pytest.approx(t.gap_A_B, abs=1e-10)

    @pytest.mark.parametrize("dims", [(3, 3, 3), (2, 3, 4)])
    def test_higher_dimensional_inequality(self, rng, dims):
        for _ in range(200):
            t = monogamy_decompose(random_pure(dims, rng))
            assert t.slack >= -1e-9

    def test_marginal_ordering(self, rng):
        for dims in ((2, 2, 2), (3, 3, 3), (2, 3, 4)):
            hs = [Hamiltonian.ladder(d) for d in dims]
            h_bc = local_sum(hs[1], hs[2])
            for _ in range(200):
                rho = random_pure(dims, rng).density()
                e_a = passive_energy(partial_trace(rho, dims, [0]), hs[0])
                e_bc = passive_energy(partial_trace(rho, dims, [1, 2]), h_bc)
                assert e_a >= e_bc - 1e-10
                if dims == (2, 2, 2):
                    assert abs(e_a - e_bc) <= 1e-10

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValidationError):
            cut_gap(random_pure((2, 2, 2), rng), "A|BC", [Hamiltonian.ladder(3)] * 3)
        with pytest.raises(ValidationError):
            cut_gap(PureState(np.eye(4)[0], (2, 2)), "A|BC")
        with pytest.raises(ValidationError):
            cut_gap(random_pure((2, 2, 2), rng), "AB|C")
