import math

import numpy as np
import pytest

from slicepower import (
    ChannelState,
    CommonRandomOutage,
    ResourceGrid,
    Scheme,
    SlicePowerError,
    TrafficSpec,
    allocate,
    build_table,
    min_feasible_power,
    mutual_info_e,
    mutual_info_sic,
    single_freq_power,
)
from slicepower.alloc import BcdOptions, descend_urllc_power, feasible_urllc_power
from slicepower.rng import substream
from slicepower.units import dbm_to_mw, snr_db_to_gain

GRID = ResourceGrid(F=12, M=7, delta_f=180e3, T=1e-3)
EPS = 1e-2
TRAFFIC = TrafficSpec(N_e=8640.0, N_u=2160.0 / 7.0, epsilon_u=EPS, M_u_max=7)
GAMMA_U = snr_db_to_gain(50.0)
GAMMA_E = snr_db_to_gain(50.0)
SIGMA2_W = 10 ** ((-108.0 - 30.0) / 10.0)
BCD = BcdOptions(draws=30_000)


@pytest.fixture(scope="module")
def noma_table():
    return build_table(
        GAMMA_U, 12, 1.0, trials=10_000, seed=77,
        axis_pu_dbm=np.arange(-15.0, 16.0),
        axis_pe_dbm=np.concatenate(([-math.inf], np.arange(-12.0, 13.0))),
    )


@pytest.fixture(scope="module")
def oma3_table():
    return build_table(
        GAMMA_U, 3, 4.0, trials=20_000, seed=77,
        axis_pu_dbm=np.arange(-10.0, 26.0),
        axis_pe_dbm=np.array([-math.inf]),
    )


def channel(drop: int, gamma_e_mean=GAMMA_E, gamma_u_mean=GAMMA_U) -> ChannelState:
    fading = substream(202, "drop", drop).standard_exponential(GRID.F)
    return ChannelState(gamma_e=gamma_e_mean * fading, Gamma_e=gamma_e_mean,
                        Gamma_u=gamma_u_mean, sigma2=SIGMA2_W)


class TestFeasibleAllocator:
    def test_oma_output_is_uniform_grid_level(self, oma3_table):
        result = allocate(GRID, TRAFFIC, channel(0), Scheme.OMA, "fea", 3, 1,
                          seed=1, table=oma3_table, evidence_trials=30_000)
        level_dbm = min_feasible_power(oma3_table, 0.0, EPS)
        on_fu = result.p_u[list(result.sets.f_u)]
        assert np.allclose(on_fu, dbm_to_mw(level_dbm))
        # grid optimality: one tabulated step below fails the target
        j = int(np.nonzero(oma3_table.axis_pu_dbm == level_dbm)[0][0])
        assert j > 0 and oma3_table.values[0, j - 1] > EPS

    def test_oma_orthogonality_exact(self, oma3_table):
        result = allocate(GRID, TRAFFIC, channel(1), Scheme.OMA, "fea", 3, 1,
                          seed=2, table=oma3_table, evidence_trials=20_000)
        assert np.all(result.p_u * result.p_e == 0.0)
        assert result.sic_satisfied

    def test_noma_feasibility_over_drops(self, noma_table):
        for drop in range(8):
            result = allocate(GRID, TRAFFIC, channel(drop), Scheme.NOMA, "fea", 12, 1,
                              seed=drop, table=noma_table, evidence_trials=30_000)
            fu = list(result.sets.f_u)
            assert np.all(result.p_u[fu] >= result.p_u_sic[fu] - 1e-15)
            assert result.p_u_hat.p_hat <= EPS + result.p_u_hat.ci_halfwidth
            assert result.sic_satisfied
            gamma = channel(drop).gamma_e
            assert mutual_info_e(result.p_e[list(result.sets.f_e)],
                                 gamma[list(result.sets.f_e)]) == pytest.approx(
                result.r_e, rel=1e-9
            )

    def test_noma_with_clear_shared_channels_matches_oma_power(self, oma3_table):
        # three shared channels so weak that the broadband water-filling
        # skips them: the worst interference is zero and the uniform part
        # of the answer equals the orthogonal one
        gamma_e = np.concatenate((np.full(3, 100.0), np.full(9, 1e4)))
        ch = ChannelState(gamma_e=gamma_e, Gamma_e=GAMMA_E, Gamma_u=GAMMA_U,
                          sigma2=SIGMA2_W)
        noma = allocate(GRID, TRAFFIC, ch, Scheme.NOMA, "fea", 3, 1,
                        seed=3, table=oma3_table, evidence_trials=10_000)
        oma = allocate(GRID, TRAFFIC, ch, Scheme.OMA, "fea", 3, 1,
                       seed=3, table=oma3_table, evidence_trials=10_000)
        fu = list(noma.sets.f_u)
        assert np.all(noma.p_e[fu] == 0.0)
        assert np.allclose(noma.p_u, oma.p_u)

    def test_worst_interference_drives_the_lookup(self, noma_table):
        p_e = np.array([0.1, 2.0, 0.5])
        sic = np.zeros(3)
        out = feasible_urllc_power(p_e, sic, noma_table, EPS)
        level = dbm_to_mw(min_feasible_power(noma_table, 2.0, EPS))
        assert np.allclose(out, level)


class TestDescentAllocator:
    def test_dominates_feasible_start_and_stays_feasible(self, noma_table):
        for drop in range(6):
            fea = allocate(GRID, TRAFFIC, channel(drop), Scheme.NOMA, "fea", 12, 1,
                           seed=drop, table=noma_table, evidence_trials=30_000)
            bcd = allocate(GRID, TRAFFIC, channel(drop), Scheme.NOMA, "bcd", 12, 1,
                           seed=drop, table=noma_table, bcd=BCD, evidence_trials=30_000)
            assert bcd.urllc_power_mw <= fea.urllc_power_mw + 1e-12
            fu = list(bcd.sets.f_u)
            assert np.all(bcd.p_u[fu] >= bcd.p_u_sic[fu] - 1e-15)
            assert bcd.p_u_hat.p_hat <= EPS + bcd.p_u_hat.ci_halfwidth
            assert bcd.sic_satisfied
            assert mutual_info_sic(bcd.p_u[fu], bcd.p_e[fu], channel(drop).gamma_e[fu],
                                   Scheme.NOMA) >= bcd.r_u * (1 - 1e-9)

    def test_fully_pinned_start_is_returned_unchanged(self):
        crn = CommonRandomOutage(GAMMA_U, 4, 1.0, draws=1000, seed=50)
        floor = np.array([2.0, 1.0, 3.0, 0.5])
        out, sweeps = descend_urllc_power(floor.copy(), floor, np.zeros(4), crn,
                                          EPS, BcdOptions(draws=1000))
        assert np.array_equal(out, floor)
        assert sweeps == 0

    def test_descent_is_bounded_by_start_and_floor(self):
        crn = CommonRandomOutage(GAMMA_U, 6, 1.0, draws=20_000, seed=51)
        start = np.full(6, 5.0)
        floor = np.array([0.0, 0.1, 0.0, 0.4, 0.0, 0.2])
        out, sweeps = descend_urllc_power(start, floor, np.full(6, 0.5), crn,
                                          EPS, BcdOptions(draws=20_000))
        assert np.all(out <= start + 1e-15)
        assert np.all(out >= floor - 1e-15)
        assert sweeps >= 1

    def test_single_frequency_converges_to_closed_form(self):
        # margin off so the stop point tracks the exact quantile rather
        # than the deliberately conservative default
        r_u, gamma = 6.0, GAMMA_U
        closed = single_freq_power(r_u, gamma, EPS, p_e_f=0.0)
        crn = CommonRandomOutage(gamma, 1, r_u, draws=200_000, seed=52)
        start = np.array([4.0 * closed])
        out, _ = descend_urllc_power(start, np.zeros(1), np.zeros(1), crn, EPS,
                                     BcdOptions(draws=200_000, use_margin=False))
        assert out[0] == pytest.approx(closed, rel=0.08)

    def test_margin_makes_descent_conservative(self):
        r_u, gamma = 6.0, GAMMA_U
        crn = CommonRandomOutage(gamma, 1, r_u, draws=50_000, seed=53)
        start = np.array([4.0 * single_freq_power(r_u, gamma, EPS, 0.0)])
        loose, _ = descend_urllc_power(start.copy(), np.zeros(1), np.zeros(1), crn, EPS,
                                       BcdOptions(draws=50_000, use_margin=False))
        crn2 = CommonRandomOutage(gamma, 1, r_u, draws=50_000, seed=53)
        tight, _ = descend_urllc_power(start.copy(), np.zeros(1), np.zeros(1), crn2, EPS,
                                       BcdOptions(draws=50_000, use_margin=True))
        assert tight[0] >= loose[0]


class TestValidation:
    def test_missing_table_names_build_command(self):
        with pytest.raises(SlicePowerError, match="table build"):
            allocate(GRID, TRAFFIC, channel(0), Scheme.NOMA, "fea", 12, 1, seed=1)

    def test_mismatched_table_rejected(self, oma3_table):
        with pytest.raises(SlicePowerError, match="mismatch"):
            allocate(GRID, TRAFFIC, channel(0), Scheme.NOMA, "fea", 12, 1,
                     seed=1, table=oma3_table)

    def test_unknown_algorithm(self, noma_table):
        with pytest.raises(ValueError):
            allocate(GRID, TRAFFIC, channel(0), Scheme.NOMA, "newton", 12, 1,
                     seed=1, table=noma_table)


class TestResultBookkeeping:
    def test_total_power_accounts_for_minislots(self, noma_table):
        result = allocate(GRID, TRAFFIC, channel(2), Scheme.NOMA, "fea", 12, 2,
                          seed=9, table=build_table(
                              GAMMA_U, 12, 0.5, trials=10_000, seed=77,
                              axis_pu_dbm=np.arange(-15.0, 16.0),
                              axis_pe_dbm=np.concatenate(([-math.inf], np.arange(-12.0, 13.0))),
                          ), evidence_trials=10_000)
        expected = GRID.M * result.p_e.sum() + 2 * result.p_u.sum()
        assert result.p_total_mw == pytest.approx(expected, rel=1e-12)
        assert result.embb_power_mw == pytest.approx(GRID.M * result.p_e.sum())
        assert result.urllc_power_mw == pytest.approx(2 * result.p_u.sum())

    def test_algorithm_and_iterations_recorded(self, noma_table):
        fea = allocate(GRID, TRAFFIC, channel(3), Scheme.NOMA, "fea", 12, 1,
                       seed=4, table=noma_table, evidence_trials=10_000)
        bcd = allocate(GRID, TRAFFIC, channel(3), Scheme.NOMA, "bcd", 12, 1,
                       seed=4, table=noma_table, bcd=BCD, evidence_trials=10_000)
        assert fea.algorithm == "fea" and fea.iterations == 0
        assert bcd.algorithm == "bcd" and bcd.iterations >= 1
