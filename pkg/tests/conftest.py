import pytest

from macgames import Discipline, PhyProfile, StageGame, Strategy, SuccessTable

# Two-rate fixture shared by most analytic tests: no overheads, so the peak
# throughputs equal the raw rates and hand arithmetic stays exact.
G1 = Strategy.mbps(3.2, 12000)
G2 = Strategy.mbps(1.6, 12000)


@pytest.fixture
def phy2():
    return PhyProfile(
        rates_bps=(1.6e6, 3.2e6),
        bit_overhead_bits=0,
        time_overhead_s=0.0,
        slot_time_s=20e-6,
        cw_min=31,
        cw_max=1023,
        txop_limit_s=0.015,
        max_payload_bits=12000,
    )


@pytest.fixture
def success_i():
    return SuccessTable({G1: 0.6, G2: 0.95})


@pytest.fixture
def success_j():
    return SuccessTable({G1: 1.0, G2: 1.0})


@pytest.fixture
def dcf_game(phy2, success_i, success_j):
    return StageGame(phy2, Discipline.DCF, (G1, G2), (G1, G2), success_i, success_j, 0.0)


@pytest.fixture
def edcf_game(phy2, success_i, success_j):
    return StageGame(
        phy2, Discipline.EDCF_STOP_ON_LOSS, (G1, G2), (G1, G2), success_i, success_j, 0.0
    )
