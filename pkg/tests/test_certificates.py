import json

import numpy as np
import pytest

from bookcross.bipartite import build_q_matrix, build_type_table, sdp_bound_solve
from bookcross.certificates import (
    check,
    check_file,
    dump,
    gw_from_dict,
    gw_to_dict,
    zar_to_dict,
)
from bookcross.gw import build_reduced, gw_reduced_solve


@pytest.fixture(scope="module")
def gw7():
    return gw_reduced_solve(build_reduced(7))


@pytest.fixture(scope="module")
def zar3():
    return sdp_bound_solve(build_q_matrix(build_type_table(3)))


def reseal(obj):
    """Recompute the digest after a deliberate edit, so only the maths can reject it."""
    from bookcross.certificates import _digest

    body = {k: v for k, v in obj.items() if k != "digest"}
    return {**body, "digest": _digest(body)}


def test_gw_round_trip(tmp_path, gw7):
    path = tmp_path / "gw7.json"
    dump(gw_to_dict(gw7), path)
    res = check_file(path)
    assert res.valid and res.kind == "gw"
    assert res.summary["nu2_lower"] == 7
    back = gw_from_dict(json.loads(path.read_text()))
    assert np.array_equal(back.y, gw7.y)


def test_zar_round_trip(tmp_path, zar3):
    path = tmp_path / "z3.json"
    dump(zar_to_dict(zar3), path)
    res = check_file(path)
    assert res.valid and res.kind == "zar"
    assert res.summary["certified_t"] == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("kind", ["gw", "zar"])
def test_bit_flips_are_rejected(tmp_path, gw7, zar3, kind):
    payload = gw_to_dict(gw7) if kind == "gw" else zar_to_dict(zar3)
    raw = bytearray(json.dumps(payload).encode())
    rng = np.random.default_rng(0)
    for _ in range(40):
        pos = int(rng.integers(len(raw)))
        bit = 1 << int(rng.integers(8))
        flipped = bytearray(raw)
        flipped[pos] ^= bit
        path = tmp_path / "flip.json"
        path.write_bytes(bytes(flipped))
        assert not check_file(path).valid


def test_tampered_y_with_fresh_digest_fails_maths(gw7):
    obj = gw_to_dict(gw7)
    obj["y"] = [0.0 for _ in obj["y"]]
    res = check(json.dumps(reseal(obj)))
    assert not res.valid and "LMI" in res.reason


def test_overclaimed_bound_is_rejected(gw7):
    obj = gw_to_dict(gw7)
    obj["claimed_bound"] += 1
    res = check(json.dumps(reseal(obj)))
    assert not res.valid and "exceeds" in res.reason


def test_zar_t_raised_fails_elementwise(zar3):
    obj = zar_to_dict(zar3)
    obj["t"] = 0.6
    res = check(json.dumps(reseal(obj)))
    assert not res.valid and "elementwise" in res.reason


@pytest.mark.parametrize("text, fragment", [
    ("not json", "JSON"),
    ("[1, 2]", "object"),
    ('{"schema": 2, "kind": "gw"}', "schema"),
    ('{"schema": 1, "kind": "other"}', "kind"),
])
def test_malformed_files(text, fragment):
    res = check(text)
    assert not res.valid and fragment in res.reason


def test_missing_field_is_diagnosed(gw7):
    obj = gw_to_dict(gw7)
    del obj["y"]
    res = check(json.dumps(reseal(obj)))
    assert not res.valid and "'y'" in res.reason


def test_non_utf8_file(tmp_path):
    path = tmp_path / "bin.json"
    path.write_bytes(b"\xff\xfe\x00")
    assert not check_file(path).valid
