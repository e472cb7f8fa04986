import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistkit import fock, partition
from twistkit.errors import DomainError, KindError
from twistkit.spectrum import SymmetrySpec, validate_spectrum

LN2 = math.log(2.0)

unit_phase = st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True).map(
    lambda t: cmath.exp(1j * t)
)


class TestUntwisted:
    def test_worked_example(self):
        s = validate_spectrum([("k0", LN2)])
        assert abs(partition.z_untwisted(s, 1.0) - 4.0) < 1e-14

    def test_empty_product(self):
        assert partition.z_untwisted(validate_spectrum([]), 1.0) == 1.0

    def test_monotone_in_beta(self):
        s = validate_spectrum([("a", 0.7), ("b", 1.3)])
        values = [partition.z_untwisted(s, b) for b in (0.5, 1.0, 2.0, 4.0, 8.0)]
        assert all(a > b > 1.0 for a, b in zip(values, values[1:]))

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(DomainError):
            partition.z_untwisted(validate_spectrum([("a", 1.0)]), 0.0)


class TestTwistedUnitary:
    def test_rho_one_reduces_to_untwisted(self):
        s = validate_spectrum([("k0", LN2)])
        sym = SymmetrySpec(kind="unitary", phases=(1.0 + 0j,))
        assert abs(partition.z_twisted_unitary(s, sym, 1.0) - 4.0) < 1e-14

    def test_rho_minus_one(self):
        s = validate_spectrum([("k0", LN2)])
        sym = SymmetrySpec(kind="unitary", phases=(-1.0 + 0j,))
        assert abs(partition.z_twisted_unitary(s, sym, 1.0) - 4.0 / 9.0) < 1e-14

    def test_rho_i(self):
        s = validate_spectrum([("k0", LN2)])
        sym = SymmetrySpec(kind="unitary", phases=(1j,))
        assert abs(partition.z_twisted_unitary(s, sym, 1.0) - 0.8) < 1e-14

    def test_rejects_antiunitary(self):
        s = validate_spectrum([("a", 1.0)])
        sym = SymmetrySpec(
            kind="antiunitary", phases=(1.0 + 0j,), labels=("a",), partners=("a",)
        )
        with pytest.raises(KindError):
            partition.z_twisted_unitary(s, sym, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(unit_phase, st.floats(min_value=0.5, max_value=3.0))
    def test_single_mode_extremes(self, rho, omega):
        # |1 - rho x|^2 is extremized at rho = +-1 for x in (0, 1)
        s = validate_spectrum([("a", omega)])
        z = partition.z_twisted_unitary(s, SymmetrySpec(kind="unitary", phases=(rho,)), 1.0)
        z_hi = partition.z_twisted_unitary(
            s, SymmetrySpec(kind="unitary", phases=(1.0 + 0j,)), 1.0
        )
        z_lo = partition.z_twisted_unitary(
            s, SymmetrySpec(kind="unitary", phases=(-1.0 + 0j,)), 1.0
        )
        assert z_lo - 1e-14 <= z <= z_hi + 1e-14


class TestLowerBound:
    def test_worked_example(self):
        s = validate_spectrum([("k0", LN2)])
        assert abs(partition.positivity_lower_bound(s, 1.0) - 4.0 / 9.0) < 1e-14

    def test_equality_at_rho_minus_one(self):
        s = validate_spectrum([("k0", LN2)])
        sym = SymmetrySpec(kind="unitary", phases=(-1.0 + 0j,))
        z = partition.z_twisted_unitary(s, sym, 1.0)
        assert abs(z - partition.positivity_lower_bound(s, 1.0)) < 1e-14

    def test_empty_spectrum(self):
        assert partition.positivity_lower_bound(validate_spectrum([]), 1.0) == 1.0

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.tuples(unit_phase, st.floats(min_value=0.4, max_value=3.0)),
                 min_size=1, max_size=4),
        st.floats(min_value=0.3, max_value=3.0),
    )
    def test_bound_holds(self, mode_data, beta):
        s = validate_spectrum([(f"m{i}", w) for i, (_, w) in enumerate(mode_data)])
        sym = SymmetrySpec(kind="unitary", phases=tuple(p for p, _ in mode_data))
        z = partition.z_twisted_unitary(s, sym, beta)
        assert z > 0.0
        assert z >= partition.positivity_lower_bound(s, beta) * (1.0 - 1e-12)


class TestOracleAgreement:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    def test_random_modes_vs_truncated_trace(self, beta):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n_modes = int(rng.integers(1, 3))
            omegas = rng.uniform(0.5, 3.0, size=n_modes)
            phases = tuple(cmath.exp(2j * math.pi * u) for u in rng.uniform(size=n_modes))
            s = validate_spectrum([(f"m{i}", w) for i, w in enumerate(omegas)])
            sym = SymmetrySpec(kind="unitary", phases=phases)
            cutoff = 90
            z = partition.z_twisted_unitary(s, sym, beta)
            oracle = fock.partition_trace(s, sym, beta, cutoff)
            tail = fock.truncation_tail_bound(s, beta, cutoff)
            assert abs(z - oracle) / z <= tail + 1e-10


class TestAntiunitary:
    def test_single_mode_conjugation(self):
        s = validate_spectrum([("k0", LN2)])
        sym = SymmetrySpec(
            kind="antiunitary", phases=(1.0 + 0j,), labels=("k0",), partners=("k0",)
        )
        z = partition.z_twisted_antiunitary(s, sym, 1.0)
        assert abs(z - 4.0 / 3.0) < 1e-14
        oracle = fock.antiunitary_partition_trace(s, sym, 1.0, 40)
        assert abs(z - oracle) < 1e-10

    def test_two_mode_swap(self):
        s = validate_spectrum([("a", LN2), ("b", LN2)])
        sym = SymmetrySpec(
            kind="antiunitary",
            phases=(1.0 + 0j, 1.0 + 0j),
            labels=("a", "b"),
            partners=("b", "a"),
        )
        z = partition.z_twisted_antiunitary(s, sym, 1.0)
        assert abs(z - 16.0 / 9.0) < 1e-14
        oracle = fock.antiunitary_partition_trace(s, sym, 1.0, 20)
        tail = fock.truncation_tail_bound(s, 1.0, 20)
        assert abs(z - oracle) / z <= tail + 1e-10

    def test_swap_with_phases_vs_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            w = float(rng.uniform(0.6, 2.0))
            etas = tuple(cmath.exp(2j * math.pi * u) for u in rng.uniform(size=2))
            s = validate_spectrum([("a", w), ("b", w)])
            sym = SymmetrySpec(
                kind="antiunitary", phases=etas, labels=("a", "b"), partners=("b", "a")
            )
            z = partition.z_twisted_antiunitary(s, sym, 1.0)
            oracle = fock.antiunitary_partition_trace(s, sym, 1.0, 25)
            tail = fock.truncation_tail_bound(s, 1.0, 25)
            assert abs(z - oracle) / z <= tail + 1e-8

    def test_empty_spectrum(self):
        s = validate_spectrum([])
        sym = SymmetrySpec(kind="antiunitary", phases=(), labels=(), partners=())
        assert partition.z_twisted_antiunitary(s, sym, 1.0) == 1.0


class TestDiagnostics:
    def test_per_mode_factors_multiply_to_z(self):
        s = validate_spectrum([("a", 0.9), ("b", 1.8)])
        sym = SymmetrySpec(kind="unitary", phases=(1j, -1.0 + 0j))
        rows = partition.per_mode_factors(s, sym, 1.2)
        prod = 1.0
        for _, factor in rows:
            prod *= factor
        assert abs(prod - partition.z_twisted_unitary(s, sym, 1.2)) < 1e-12 * prod
