import pytest

import vanetagg as v


@pytest.fixture(scope="module")
def keys():
    return v.Keys.generate(seed=11)


def test_keys_roundtrip_through_bytes(keys):
    again = v.Keys.load(keys.params_bytes(), keys.master_bytes())
    assert again.params_bytes() == keys.params_bytes()
    assert again.public_key("ABC-1234") == keys.public_key("ABC-1234")
    assert keys.public_key("ABC-1234") != keys.public_key("ABC-1235")


def test_field_inverse():
    a = bytes(range(1, 33))
    one = (1).to_bytes(32, "big")
    assert v.gf_mul(a, v.gf_inv(a)) == one
    assert v.gf_add(a, a) == bytes(32)


def test_interpolation_passes_through_points():
    pts = [(i.to_bytes(32, "big"), (i * i + 7).to_bytes(32, "big")) for i in range(1, 6)]
    for x, y in pts:
        assert v.gf_interpolate_eval(pts, x) == y


def test_sign_verify(keys):
    assert v.sign_verify(keys, "KA-01-7777", bytes(31) + b"\x05", 3)


@pytest.mark.parametrize("encrypt,variant", [(False, False), (True, True)])
def test_aggregation_roundtrip(keys, encrypt, variant):
    s = v.initiate(keys, "INIT-1", "H3", t=3, r=12, now=10.0, encrypt=encrypt, variant_keys=variant, seed=5)
    req = s.request()
    for i in range(2):
        rep = v.reply(keys, f"REP-{i}", req, variant_keys=variant, seed=100 + i)
        assert s.handle_reply(rep, 10.5) == "accepted"
    assert s.ready
    ann = s.finalize()
    assert v.verify_announcement(keys, ann, now=11.0) == "accept"
    assert v.verify_announcement(keys, ann, now=10.0 + 10_000) == "reject(replay)"

    # A flipped byte must not verify.
    bad = bytearray(ann)
    bad[len(bad) // 2] ^= 1
    try:
        assert v.verify_announcement(keys, bytes(bad), now=11.0) != "accept"
    except v.Error:
        pass


def test_finalize_without_replies_raises(keys):
    s = v.initiate(keys, "INIT-2", "V1", t=3, r=12, seed=6)
    with pytest.raises(v.Error) as info:
        s.finalize()
    assert info.value.code == "InsufficientFractions"


def test_anonymity():
    assert v.anonymity_prob_exact(3, 10, 3) == (1, 120)
    assert v.anonymity_prob(3, 10, 3) == pytest.approx(1 / 120)
    with pytest.raises(v.Error):
        v.anonymity_prob(4, 3, 1)


def test_simulation_is_deterministic():
    cfg = "vehicle_count = 120\nt = 2\nr = 12\nruns = 5\n"
    a = v.sweep(cfg)
    assert a == v.sweep(cfg)
    assert len(a) == 1 and a[0]["runs"] == 5
    m = v.run_scenario(cfg, seed=4)
    assert m == v.run_scenario(cfg, seed=4)
    assert m["aggregation_delay"] >= m["crypto_time"] >= 0


def test_bad_config_raises():
    with pytest.raises(v.Error) as info:
        v.format_scenario("no_such_key = 1")
    assert info.value.code == "ConfigError"
