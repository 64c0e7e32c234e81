import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqipe import estimators as est
from dqipe import wire
from dqipe.protocol import (
    Interactive,
    Message,
    OneWay,
    ProtocolViolation,
    Role,
    Smp,
    Transcript,
    multicopy_smp_strategies,
    parse_setting,
    pi0_oneway_strategies,
    run_protocol,
    singlecopy_smp_strategies,
    transcript_cost,
    validate_transcript,
)
from dqipe.rng import RngStream


def _msg(sender, receiver, round_=1, mtype="scalar", payload=0.0, nbytes=10):
    return Message(round_, sender, receiver, mtype, payload, nbytes)


def _pair(seed=5, d=8, f=0.5):
    root = RngStream(seed)
    phi, psi = est.make_state_pair(d, f, root.child(0))
    return phi, psi, root.child(1)


# --- wire format ---


@given(
    re=st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=8),
    im=st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=8),
)
@settings(max_examples=40, deadline=None)
def test_state_vector_roundtrip_is_exact(re, im):
    n = min(len(re), len(im))
    vec = np.array([complex(a, b) for a, b in zip(re[:n], im[:n])])
    frame = wire.make_frame("r", 1, "alice", "referee", "state_vector", vec)
    back = wire.decode_frame(wire.encode_frame(frame))
    decoded = wire.decode_payload(back["type"], back["payload"])
    assert np.array_equal(decoded, vec)


def test_bad_frames_rejected():
    with pytest.raises(wire.WireError):
        wire.decode_frame("not json")
    with pytest.raises(wire.WireError):
        wire.decode_frame('{"v": 1}')
    with pytest.raises(wire.WireError):
        wire.decode_frame(
            '{"v": 9, "run": "r", "round": 0, "from": "alice", "to": "bob",'
            ' "type": "scalar", "payload": 1.0}'
        )
    with pytest.raises(wire.WireError):
        wire.make_frame("r", 0, "alice", "bob", "telepathy", None)


def test_parse_setting():
    assert parse_setting("smp") == Smp()
    assert parse_setting("oneway") == OneWay()
    assert parse_setting("interactive:5") == Interactive(max_rounds=5)
    with pytest.raises(ValueError):
        parse_setting("psychic")


# --- validator on canned transcripts ---


def test_valid_smp_transcript_ok():
    t = Transcript(
        Smp(),
        [_msg(Role.ALICE, Role.REFEREE, 1), _msg(Role.BOB, Role.REFEREE, 2)],
    )
    assert validate_transcript(t) == "ok"


def test_smp_rejects_alice_to_bob():
    t = Transcript(Smp(), [_msg(Role.ALICE, Role.BOB)])
    assert validate_transcript(t) == "A→B not allowed in SMP"


def test_oneway_rejects_wrong_order():
    t = Transcript(
        OneWay(),
        [_msg(Role.BOB, Role.REFEREE, 1), _msg(Role.ALICE, Role.BOB, 2)],
    )
    assert "A→B then B→Referee" in validate_transcript(t)


def test_interactive_rejects_excess_alternations():
    msgs = [
        _msg(Role.ALICE, Role.BOB, 1),
        _msg(Role.BOB, Role.ALICE, 2),
        _msg(Role.ALICE, Role.BOB, 3),
        _msg(Role.BOB, Role.ALICE, 4),
    ]
    t = Transcript(Interactive(max_rounds=3), msgs)
    assert "exceed max_rounds" in validate_transcript(t)


def test_validator_rejects_self_message():
    t = Transcript(Smp(), [_msg(Role.ALICE, Role.ALICE)])
    assert "itself" in validate_transcript(t)


def test_transcript_cost_empty():
    assert transcript_cost(Transcript(Smp())) == (0, 0)


# --- run_protocol ---


def test_multicopy_smp_bit_identical_to_direct():
    phi, psi, rng = _pair()
    direct = est.multicopy_estimate(phi, psi, 16, rng)
    a, b, ref = multicopy_smp_strategies(16)
    t = run_protocol(Smp(), a, b, ref, {Role.ALICE: phi, Role.BOB: psi}, rng)
    assert t.result["w"] == direct.value
    assert t.result["raw"] == direct.raw
    assert validate_transcript(t) == "ok"
    assert t.shared_seed is None


def test_singlecopy_smp_bit_identical_to_direct():
    phi, psi, rng = _pair(seed=6)
    direct = est.singlecopy_estimate(phi, psi, 3, 16, rng)
    a, b, ref = singlecopy_smp_strategies(8, 3, 16)
    t = run_protocol(
        Smp(), a, b, ref, {Role.ALICE: phi, Role.BOB: psi}, rng,
        shared_randomness=True,
    )
    assert t.result["w"] == direct.value
    assert t.shared_seed == (rng.seed, rng.child(est.STREAM_SHARED).path)


def test_pi0_oneway_two_messages():
    phi, psi, rng = _pair(seed=8, d=6, f=0.0)
    a, b, ref = pi0_oneway_strategies(3)
    t = run_protocol(OneWay(), a, b, ref, {Role.ALICE: phi, Role.BOB: psi}, rng)
    assert len(t.messages) == 2
    assert (t.messages[0].sender, t.messages[0].receiver) == (Role.ALICE, Role.BOB)
    assert (t.messages[1].sender, t.messages[1].receiver) == (Role.BOB, Role.REFEREE)
    assert t.result["case"] in (1, 2)


def test_disallowed_send_raises_and_names_edge():
    phi, psi, rng = _pair()

    def bad_alice(ctx):
        ctx.send(Role.BOB, "scalar", 1.0)

    def bob(ctx):
        ctx.send(Role.REFEREE, "scalar", 1.0)

    with pytest.raises(ProtocolViolation, match="alice→bob not allowed in smp"):
        run_protocol(
            Smp(), bad_alice, bob, lambda ctx: None,
            {Role.ALICE: phi, Role.BOB: psi}, rng,
        )


def test_second_message_rejected_in_smp():
    phi, psi, rng = _pair()

    def chatty(ctx):
        ctx.send(Role.REFEREE, "scalar", 1.0)
        ctx.send(Role.REFEREE, "scalar", 2.0)

    with pytest.raises(ProtocolViolation, match="second message"):
        run_protocol(
            Smp(), chatty, chatty, lambda ctx: None,
            {Role.ALICE: phi, Role.BOB: psi}, rng,
        )


def test_interactive_alternation():
    phi, psi, rng = _pair()

    def alice(ctx):
        ctx.send(Role.BOB, "scalar", float(len(ctx.inbox)))

    def bob(ctx):
        if len(ctx.inbox) >= 2:
            ctx.send(Role.REFEREE, "scalar", 1.0)
        else:
            ctx.send(Role.ALICE, "scalar", float(len(ctx.inbox)))

    def ref(ctx):
        return ctx.inbox[0].payload

    t = run_protocol(
        Interactive(max_rounds=6), alice, bob, ref,
        {Role.ALICE: phi, Role.BOB: psi}, rng,
    )
    assert validate_transcript(t) == "ok"
    senders = [m.sender for m in t.messages]
    assert senders == [Role.ALICE, Role.BOB, Role.ALICE, Role.BOB]
    assert t.result == 1.0


def test_transcripts_deterministic():
    phi, psi, rng = _pair(seed=12)
    a, b, ref = multicopy_smp_strategies(8)
    runs = [
        run_protocol(Smp(), a, b, ref, {Role.ALICE: phi, Role.BOB: psi}, rng)
        for _ in range(2)
    ]
    assert runs[0].result == runs[1].result
    for m1, m2 in zip(runs[0].messages, runs[1].messages):
        assert m1.round == m2.round and m1.sender == m2.sender
        assert np.array_equal(m1.payload, m2.payload)


def test_tcp_transport_matches_inproc():
    phi, psi, rng = _pair(seed=13)
    a, b, ref = multicopy_smp_strategies(8)
    inputs = {Role.ALICE: phi, Role.BOB: psi}
    t_in = run_protocol(Smp(), a, b, ref, inputs, rng)

    server = wire.FrameCollectorServer().start()
    try:
        tp = wire.open_transport(f"tcp:{server.address}")
        try:
            t_tcp = run_protocol(Smp(), a, b, ref, inputs, rng, transport=tp)
        finally:
            tp.close()
    finally:
        server.stop()

    assert t_tcp.result == t_in.result
    assert len(server.frames) == len(t_in.messages) + 2  # hello and result too
    for m1, m2 in zip(t_in.messages, t_tcp.messages):
        assert np.array_equal(m1.payload, m2.payload)
        assert m1.nbytes == m2.nbytes


def test_transcript_cost_counts_bytes():
    phi, psi, rng = _pair(seed=14)
    a, b, ref = multicopy_smp_strategies(4)
    t = run_protocol(Smp(), a, b, ref, {Role.ALICE: phi, Role.BOB: psi}, rng)
    n, total = transcript_cost(t)
    assert n == 2
    assert total == sum(m.nbytes for m in t.messages) > 0
