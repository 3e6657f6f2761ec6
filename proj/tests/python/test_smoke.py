import math

import pytest

import rwm


def test_presets_are_feasible():
    names = rwm.preset_names()
    assert names == ["desk-default", "ci-small", "unit-tiny"]
    desk = rwm.describe_preset("desk-default")
    assert desk["capacity_bits"] == 1023
    assert desk["sigma_bits"] == 896
    for name in names:
        rep = rwm.describe_preset(name)
        assert rep["feasible"] and rep["lower_bound_ok"]


def test_lower_bound():
    assert rwm.sketch_size_lower_bound(10, 2) == pytest.approx(math.log2(45))


def test_generate_verify_recover():
    keys = rwm.keygen("unit-tiny", seed="01")
    vk = keys.verification_key()
    y = rwm.generate(keys, rwm.LanguageModel.uniform(), rwm.BitString.from_text("0110"), 3, seed="02")
    assert len(y) == 3 * vk.n
    rep = rwm.verify(vk, y)
    assert rep["accepted"] and rep["matched_offset"] == 0
    contents = [e["content"] for e in rwm.recover(vk, y)]
    assert y.slice(0, 2 * vk.n) in contents


def test_random_input_rejects():
    keys = rwm.keygen("unit-tiny", seed="03")
    vk = keys.verification_key()
    zeta = rwm.random_bits(4 * vk.n, seed="04")
    rep = rwm.verify(vk, zeta)
    assert not rep["accepted"]
    assert rep["reason"] == "NoWindow"
    assert rwm.recover(vk, zeta) == []


def test_key_serialization_round_trip():
    keys = rwm.keygen("unit-tiny", seed="05")
    vk = rwm.load_verification_key(keys.verification_key().serialize())
    again = rwm.load_generation_key(keys.serialize())
    y = rwm.generate(again, rwm.LanguageModel.biased(0.6), blocks=2, seed="06")
    assert rwm.verify(vk, y)["accepted"]
    with pytest.raises(ValueError):
        rwm.load_generation_key(keys.verification_key().serialize())


def test_bitstream_codec():
    b = rwm.BitString.from_text("1011001")
    assert rwm.BitString.decode(b.encode()) == b
    assert b.to_text() == "1011001"
    assert b[0] and not b[1]


def test_attack_summary():
    keys = rwm.keygen("unit-tiny", seed="07")
    s = rwm.run_attack(keys, rwm.LanguageModel.uniform(), "random", trials=5, seed="08")
    assert s["accept_rate"] == 0.0
    assert s["unforgeability_violations"] == 0


def test_model_json():
    m = rwm.LanguageModel.from_json('{"kind": "markov", "order": 1, "table": [0.9, 0.2]}')
    assert m.next_bit_prob(rwm.BitString.from_text("1")) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        rwm.LanguageModel.from_json('{"kind": "nope"}')
