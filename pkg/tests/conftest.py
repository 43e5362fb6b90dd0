from pathlib import Path

import pytest

from ringflow import (PipelineConfig, SeriesOptions, WithdrawalSchedule,
                      load_scenario)

SCENARIO_PATH = Path(__file__).resolve().parent.parent / "scenarios" / "reference.yaml"


@pytest.fixture(scope="session")
def cfg() -> PipelineConfig:
    """30 km reference ring."""
    return PipelineConfig(length_m=30000.0, sound_speed_m_s=383.3,
                          linearization_a=0.05, inlet_pressure_pa=140000.0,
                          base_flow=10.0)


@pytest.fixture(scope="session")
def schedule() -> WithdrawalSchedule:
    """Base flow plus 10 percent, concentrated at the 12 km tap."""
    return WithdrawalSchedule.from_pairs([(12000.0, 11.0)])


@pytest.fixture(scope="session")
def empty_schedule() -> WithdrawalSchedule:
    return WithdrawalSchedule(())


@pytest.fixture(scope="session")
def opts() -> SeriesOptions:
    return SeriesOptions()


@pytest.fixture(scope="session")
def scenario_text() -> str:
    return SCENARIO_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def scenario(scenario_text):
    return load_scenario(scenario_text)
