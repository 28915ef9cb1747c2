"""Randomized stage games for property suites.

The generator keeps two properties by construction so the suites test what
they mean to test:

* success tables respect weak rate monotonicity (lower rate, no worse);
* payload and TXOP allowance are chosen so that every rate's airtime divides
  the allowance exactly (no overheads). Full-burst occupancy then equals the
  allowance for every strategy, which is the regime where fixed-time-share
  reasoning applies without quantization noise.
"""

from macgames import PhyProfile, StageGame, Strategy, SuccessTable

RATES_BPS = (1e6, 2e6, 5.5e6, 11e6)
PAYLOADS = (4000, 8000, 12000)


def random_game(rng, discipline, n_strategies=2, with_idle=True) -> StageGame:
    payload = int(rng.choice(PAYLOADS))
    mult = int(rng.integers(1, 3))
    # allowance = 2*mult frames at 1 Mbps => 4*mult at 2, 11*mult at 5.5, 22*mult at 11
    txop = 2 * mult * payload / 1e6
    phy = PhyProfile(
        rates_bps=RATES_BPS,
        bit_overhead_bits=0,
        time_overhead_s=0.0,
        txop_limit_s=txop,
        max_payload_bits=12000,
    )
    picks = sorted(rng.choice(len(RATES_BPS), size=n_strategies, replace=False))
    strategies = tuple(Strategy(RATES_BPS[k], payload) for k in picks)
    t_idle = float(rng.uniform(0.0, 0.01)) if with_idle and rng.random() < 0.7 else 0.0
    return StageGame(
        phy=phy,
        discipline=discipline,
        strategies_i=strategies,
        strategies_j=strategies,
        success_i=random_success_table(rng, strategies),
        success_j=random_success_table(rng, strategies),
        t_idle_s=t_idle,
    )


def random_success_table(rng, strategies) -> SuccessTable:
    # draws sorted descending against ascending rate keep Statement-style
    # monotonicity: the lower rate never does worse
    draws = sorted(rng.uniform(0.05, 1.0, size=len(strategies)), reverse=True)
    ordered = sorted(strategies, key=lambda s: s.rate_bps)
    return SuccessTable(dict(zip(ordered, draws)))
