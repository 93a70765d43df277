from __future__ import annotations

import pytest

from hapsris.channel import ChannelParams
from hapsris.engine import CampaignSpec
from hapsris.scenario import AreaSpec

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


class AcceptanceLog:
    def record(self, criterion: str, title: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE[criterion] = ("PASS" if passed else "FAIL", f"{title} {detail}".strip())


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: (int(k.rstrip("abcdefgh")), k)):
        verdict, text = _ACCEPTANCE[key]
        terminalreporter.write_line(f"[{verdict}] criterion {key}: {text}")


@pytest.fixture
def small_spec():
    return CampaignSpec(scenario=AreaSpec(num_gateways=20), channel=ChannelParams(),
                        dl_tx_power_dbm=(50.0, 55.0), ul_tx_power_dbm=(28.0, 30.0),
                        num_drops=3, master_seed=7)
