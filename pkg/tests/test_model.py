import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from refnet.model import (
    CALIBRATION,
    CELLS,
    NetworkParams,
    ParameterError,
    WorkerCell,
    derived_rates,
    homophily_bias,
    homophily_sensitivity,
    homophily_share,
    referral_offer_shares,
)

from conftest import random_params


def enumerated_same_type_share(n_own: int, n_other: int, psi: Fraction) -> Fraction:
    """Every period-1 worker meets every period-2 worker; a meeting becomes a
    tie with probability psi for the same type and 1 - psi otherwise."""
    own_ties = sum(psi for _ in range(n_own))
    other_ties = sum(1 - psi for _ in range(n_other))
    return own_ties / (own_ties + other_ties)


shares = st.floats(0.01, 0.99)
biases = st.floats(0.5, 0.999)


class TestHomophilyShare:
    def test_worked_example(self):
        assert homophily_share(2 / 3, 2 / 3) == pytest.approx(0.8, abs=1e-12)
        assert homophily_share(1 / 3, 2 / 3) == pytest.approx(0.5, abs=1e-12)

    def test_matches_encounter_enumeration(self):
        psi = Fraction(2, 3)
        assert enumerated_same_type_share(2, 1, psi) == Fraction(4, 5)
        for n_own, n_other in [(2, 1), (1, 2), (7, 3), (3, 7), (5, 5)]:
            for psi in (Fraction(1, 2), Fraction(3, 5), Fraction(9, 10)):
                w = n_own / (n_own + n_other)
                expected = float(enumerated_same_type_share(n_own, n_other, psi))
                assert homophily_share(w, float(psi)) == pytest.approx(expected, rel=1e-12)

    def test_calibration_minority(self):
        assert homophily_share(0.30, 0.83) == pytest.approx(0.68, abs=0.005)

    def test_no_bias_returns_population_share(self):
        assert homophily_share(0.4, 0.5) == pytest.approx(0.4, abs=1e-15)

    @pytest.mark.parametrize("w,psi", [(0.0, 0.6), (1.0, 0.6), (0.5, 0.49), (0.5, 1.0), (-0.1, 0.7)])
    def test_rejects_out_of_range(self, w, psi):
        with pytest.raises(ParameterError):
            homophily_share(w, psi)

    @given(biases)
    def test_equal_groups_linear(self, psi):
        assert homophily_share(0.5, psi) == pytest.approx(psi, rel=1e-14)

    @given(shares, biases)
    def test_never_below_population_share(self, w, psi):
        phi = homophily_share(w, psi)
        assert w - 1e-15 <= phi < 1

    @given(shares, st.floats(0.5, 0.99), st.floats(1e-3, 0.009))
    def test_increasing_in_psi(self, w, psi, step):
        assert homophily_share(w, psi + step) > homophily_share(w, psi)

    @given(st.floats(0.01, 0.98), st.floats(0.51, 0.999), st.floats(1e-3, 0.01))
    def test_increasing_in_w(self, w, psi, step):
        assert homophily_share(w + step, psi) > homophily_share(w, psi)


class TestHomophilyBias:
    def test_examples(self):
        assert homophily_bias(2 / 3, 0.8) == pytest.approx(2 / 3, abs=1e-12)
        assert homophily_bias(0.30, 0.68) == pytest.approx(0.83, abs=0.01)
        assert homophily_bias(0.5, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_rejects_heterophily(self):
        with pytest.raises(ParameterError, match="phi"):
            homophily_bias(0.6, 0.5)

    @given(shares, biases)
    def test_round_trip(self, w, psi):
        assert homophily_bias(w, homophily_share(w, psi)) == pytest.approx(psi, rel=1e-12)

    def test_round_trip_grid(self):
        for w in np.linspace(0.05, 0.95, 19):
            for phi in np.linspace(w, 0.99, 13):
                assert homophily_share(w, homophily_bias(w, phi)) == pytest.approx(phi, rel=1e-12)


class TestSensitivity:
    def test_majority_above_linear_minority_below(self):
        psi = np.linspace(0.51, 0.99, 49)
        for _, phi, lin in homophily_sensitivity(0.8, psi):
            assert phi > lin
        for _, phi, lin in homophily_sensitivity(0.2, psi):
            assert phi < lin

    def test_linear_at_half(self):
        for psi, phi, lin in homophily_sensitivity(0.5, np.linspace(0.5, 0.99, 11)):
            assert phi == pytest.approx(lin, abs=1e-14)


class TestNetworkParams:
    def test_boundaries(self):
        NetworkParams(0.7, 1.0, 1.0, 1.0, 0.5, 0.5)
        for bad in [
            dict(delta=0.5),
            dict(delta=1.0),
            dict(alpha=0.5),
            dict(tau_maj=0.0),
            dict(tau_min=1.01),
            dict(psi_maj=0.49),
            dict(psi_min=1.0),
        ]:
            with pytest.raises(ParameterError) as err:
                CALIBRATION.replace(**bad)
            (name,) = bad
            assert name in str(err.value)
            assert err.value.field == name

    def test_rejects_nan(self):
        with pytest.raises(ParameterError):
            CALIBRATION.replace(alpha=math.nan)

    def test_from_mapping_rejects_unknown(self):
        with pytest.raises(KeyError):
            NetworkParams.from_mapping({**CALIBRATION.as_dict(), "beta": 1})

    def test_frozen(self):
        with pytest.raises(AttributeError):
            CALIBRATION.delta = 0.6


class TestWorkerCell:
    def test_four_cells(self):
        assert len(CELLS) == 4
        assert {c.label for c in CELLS} == {"H_maj", "H_min", "L_maj", "L_min"}


class TestDerivedRates:
    def test_calibration_escape_probabilities(self, calib):
        # hand evaluation with the rounded shares used in the calibration text
        phi_maj, phi_min = 0.94, 0.68
        p_hmaj = 0.7 * 0.41 * phi_maj + 0.3 * 0.43 * (1 - phi_min)
        p_hmin = 0.7 * 0.41 * (1 - phi_maj) + 0.3 * 0.43 * phi_min
        r = derived_rates(calib)
        assert r.e[WorkerCell.H_MAJ] == pytest.approx(math.exp(-p_hmaj), abs=2e-3)
        assert r.e[WorkerCell.H_MIN] == pytest.approx(math.exp(-p_hmin), abs=2e-3)
        assert r.e[WorkerCell.H_MAJ] == pytest.approx(0.732, abs=1e-3)
        assert r.e[WorkerCell.H_MIN] == pytest.approx(0.901, abs=1e-3)
        assert r.e[WorkerCell.L_MAJ] == r.e[WorkerCell.L_MIN] == 1.0

    def test_full_ability_sorting(self):
        r = derived_rates(NetworkParams(0.6, 1.0, 0.5, 0.7, 0.6, 0.8))
        assert r.p[WorkerCell.L_MAJ] == 0 and r.p[WorkerCell.L_MIN] == 0

    def test_no_type_bias_proportional(self):
        r = derived_rates(NetworkParams(0.7, 0.8, 0.6, 0.6, 0.5, 0.5))
        share = r.p[WorkerCell.H_MAJ] / (r.p[WorkerCell.H_MAJ] + r.p[WorkerCell.H_MIN])
        assert share == pytest.approx(0.7, abs=1e-14)

    def test_invariants_random(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            prm = random_params(rng)
            r = derived_rates(prm)
            d = prm.delta
            mass = d * prm.tau_maj + (1 - d) * prm.tau_min
            assert r.phi_maj >= d and r.phi_min >= 1 - d - 1e-15
            assert r.p[WorkerCell.H_MAJ] + r.p[WorkerCell.H_MIN] == pytest.approx(prm.alpha * mass, rel=1e-12)
            assert r.p[WorkerCell.L_MAJ] + r.p[WorkerCell.L_MIN] == pytest.approx(
                (1 - prm.alpha) * mass, rel=1e-12, abs=1e-15
            )
            for x in CELLS:
                assert r.e[x] == math.exp(-r.p[x])
                assert 0 < r.e[x] <= 1


class TestReferralOfferShares:
    def test_worked_example(self):
        for alpha in (0.6, 1.0):
            maj, mn = referral_offer_shares(NetworkParams(2 / 3, alpha, 1.0, 1.0, 2 / 3, 2 / 3))
            assert maj == pytest.approx(0.7, abs=1e-12)
            assert mn == pytest.approx(0.3, abs=1e-12)

    def test_no_bias_proportional(self):
        maj, mn = referral_offer_shares(NetworkParams(0.65, 0.9, 0.3, 0.7, 0.5, 0.5))
        assert (maj, mn) == pytest.approx((0.65, 0.35), abs=1e-14)

    def test_equal_magnitude_example(self):
        _, mn = referral_offer_shares(NetworkParams(0.6, 0.8, 0.8, 0.8, 0.8, 0.8))
        # closed form evaluated by hand: 0.6*(1-0.857142..) + 0.4*(0.727272..)
        assert mn == pytest.approx(0.6 * (1 - 6 / 7) + 0.4 * (8 / 11), rel=1e-12)
        assert mn < 0.4

    def test_minority_underrepresented_grid(self):
        rng = np.random.default_rng(5)
        for _ in range(2000):
            prm = random_params(rng, equal=True)
            if prm.psi_maj == 0.5:
                continue
            maj, mn = referral_offer_shares(prm)
            assert mn < 1 - prm.delta
            assert maj > prm.delta
            assert maj + mn == pytest.approx(1.0, abs=1e-15)
