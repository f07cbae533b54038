#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: test_campaigns.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

import pytest

from distmet.campaigns import (
    CAMPAIGN_COLUMNS,
    CampaignResult,
    run_campaign,
    run_instance,
)
from distmet.exceptions import BoundViolationError, ValidationError


pytestmark = [pytest.mark.asyncio]


@pytest.mark.parametrize("family", ["fock", "separable", "routes"])
async def test_campaign_passes(family):
    result = await run_campaign(family, 6, 2026)

    assert len(result.rows) == 6
    assert result.violations == 0
    assert [row["index"] for row in result.rows] == list(range(6))
    assert set(result.columns) == set(result.rows[0])


async def test_campaign_deterministic():
    first = await run_campaign("routes", 4, 11)
    second = await run_campaign("routes", 4, 11)

    assert first.rows == second.rows


async def test_replay_instance():
    result = await run_campaign("fock", 3, 5)
    row = result.rows[2]

    assert run_instance("fock", 2, row["seed"]) == row


async def test_fock_rows():
    result = await run_campaign("fock", 5, 1)

    for row in result.rows:
        assert row["fw"] <= row["trace_bound"] + 1e-9
        assert row["trace_bound"] <= row["pairing_bound"] + 1e-9
        assert row["fw"] == pytest.approx(row["fw_moments"], abs=1e-10)
        assert sum(int(n) for n in row["photons"].split(";")) >= 1


async def test_invalid_campaign():
    with pytest.raises(ValidationError):
        await run_campaign("fock", 0, 1)

    with pytest.raises(ValidationError):
        await run_campaign("nonsense", 5, 1)

    with pytest.raises(ValidationError):
        run_instance("nonsense", 0, 1)


def test_columns():
    assert set(CAMPAIGN_COLUMNS) == {"fock", "separable", "routes"}
    for columns in CAMPAIGN_COLUMNS.values():
        assert columns[:2] == ["index", "seed"]
        assert columns[-1] == "pass"


def test_check_violations():
    rows = [{"index": 0, "pass": True}, {"index": 1, "pass": False}]
    result = CampaignResult("fock", 0, rows)

    assert result.violations == 1

    with pytest.raises(BoundViolationError, match=r"instances \[1\]"):
        result.check()

    CampaignResult("fock", 0, rows[:1]).check()
