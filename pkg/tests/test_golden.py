"""Frozen variation profiles for the torus/expander separation.

The stored values were produced once by this package and cross-checked
against an exact rational ball-average oracle; the suite demands
bit-identical reproduction so any drift in sampling, hashing, or float
evaluation order is caught immediately.
"""
import json
from pathlib import Path

import coarsecohom as cc
from helpers import frac_ball_nu

GOLDEN = json.loads(
    (Path(__file__).parent / "data" / "golden_separation.json").read_text())


def rebuild(entry):
    return cc.generate_family(entry["kind"], entry["params"],
                              seed=entry["seed"])


def test_spaces_rebuild_to_stored_hashes():
    for name in ("torus12", "rr128"):
        entry = GOLDEN["instances"][name]
        assert rebuild(entry).content_hash() == entry["space_hash"], name


def test_profiles_are_bit_identical():
    schedule = GOLDEN["schedule"]
    r = GOLDEN["r"]
    for name in ("torus12", "rr128"):
        entry = GOLDEN["instances"][name]
        table = cc.variation_profile(rebuild(entry), schedule, [r])
        got = [table.get(s, r).nu for s in schedule]
        assert got == entry["nu"], name  # float equality on purpose


def test_torus_decays_while_expander_stalls():
    torus = GOLDEN["instances"]["torus12"]["nu"]
    expander = GOLDEN["instances"]["rr128"]["nu"]
    assert expander[-1] > torus[-1]
    gap = expander[-1] - torus[-1]
    assert abs(gap - GOLDEN["separation_at_last_s"]) <= 1e-15
    assert cc.diagnose(torus, 1.0, GOLDEN["schedule"]).verdict == "decaying"
    assert cc.diagnose(expander, 1.0, GOLDEN["schedule"]).verdict == "stalled"


def test_golden_values_match_rational_oracle():
    for name in ("torus12", "rr128"):
        entry = GOLDEN["instances"][name]
        sp = rebuild(entry)
        for s, nu in zip(GOLDEN["schedule"], entry["nu"]):
            exact = frac_ball_nu(sp, int(s), int(GOLDEN["r"]))
            assert abs(nu - float(exact)) <= 1e-12, (name, s)
