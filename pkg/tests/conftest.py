from __future__ import annotations

import pytest

import jumpvol as jv


@pytest.fixture
def rng() -> jv.RngStream:
    return jv.RngStream(20230817)


@pytest.fixture
def make_rng():
    def factory(seed: int = 20230817, stream_id: int = 0) -> jv.RngStream:
        return jv.RngStream(seed, stream_id)

    return factory


_DESK_SIM = jv.SimConfig(n=800, mu=0.05, jump_prob=0.04, jump_mean=-4.0, jump_sd=2.0, seed=21)


@pytest.fixture(scope="session")
def small_sim() -> jv.SimOutput:
    """Jump-dense short realization with well-separated jump sizes."""
    return jv.simulate(_DESK_SIM)


@pytest.fixture(scope="session")
def small_sim_config() -> jv.SimConfig:
    return _DESK_SIM
