"""Two-party protocol harness with a referee.

Alice, Bob, and the Referee exchange classical messages under one of
three settings: simultaneous messages to the referee, a single one-way
Alice-to-Bob message, or alternating interactive rounds. Strategies are
callbacks receiving a PartyContext (own quantum input, own rng stream,
messages visible so far); every message passes through a pluggable
transport as a wire frame, so the in-process and tcp transports produce
identical transcripts.

Stream assignment matches the estimator layout: shared randomness is
child 0, Alice child 1, Bob child 2, Referee child 3 of the run stream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

from .estimators import STREAM_SHARED, STREAM_ALICE, STREAM_BOB, STREAM_REFEREE
from .rng import RngStream
from .wire import InprocTransport, decode_payload, encode_frame, make_frame

__all__ = [
    "Role",
    "Smp",
    "OneWay",
    "Interactive",
    "parse_setting",
    "Message",
    "Transcript",
    "ProtocolViolation",
    "PartyContext",
    "run_protocol",
    "validate_transcript",
    "transcript_cost",
    "multicopy_smp_strategies",
    "singlecopy_smp_strategies",
    "pi0_oneway_strategies",
]


class Role(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"
    REFEREE = "referee"


@dataclass(frozen=True)
class Smp:
    """Both parties send one simultaneous message to the referee."""

    name: str = field(default="smp", init=False)


@dataclass(frozen=True)
class OneWay:
    """One Alice-to-Bob message, then Bob reports to the referee."""

    name: str = field(default="oneway", init=False)


@dataclass(frozen=True)
class Interactive:
    """Alternating Alice/Bob messages, at most max_rounds, then a report."""

    max_rounds: int = 2
    name: str = field(default="interactive", init=False)


Setting = Smp | OneWay | Interactive


def parse_setting(text: str) -> Setting:
    if text == "smp":
        return Smp()
    if text == "oneway":
        return OneWay()
    if text == "interactive":
        return Interactive()
    if text.startswith("interactive:"):
        return Interactive(max_rounds=int(text.split(":", 1)[1]))
    raise ValueError(f"unknown setting {text!r}")


@dataclass(frozen=True)
class Message:
    round: int
    sender: Role
    receiver: Role
    mtype: str
    payload: object
    nbytes: int


@dataclass
class Transcript:
    setting: Setting
    messages: list[Message] = field(default_factory=list)
    result: object = None
    shared_seed: tuple | None = None  # (seed, path) of the pre-shared stream


class ProtocolViolation(RuntimeError):
    pass


_EDGES = {
    "smp": {(Role.ALICE, Role.REFEREE), (Role.BOB, Role.REFEREE)},
    "oneway": {(Role.ALICE, Role.BOB), (Role.BOB, Role.REFEREE)},
    "interactive": {
        (Role.ALICE, Role.BOB),
        (Role.BOB, Role.ALICE),
        (Role.ALICE, Role.REFEREE),
        (Role.BOB, Role.REFEREE),
    },
}


class PartyContext:
    """What one party sees: its input, rng, inbox, and a validated send."""

    def __init__(self, role: Role, quantum_input, rng: RngStream,
                 shared: RngStream | None, inbox_fn: Callable[[], list[Message]],
                 deliver: Callable):
        self.role = role
        self.input = quantum_input
        self.rng = rng
        self.shared = shared
        self._inbox_fn = inbox_fn
        self._deliver = deliver

    @property
    def inbox(self) -> list[Message]:
        """Messages addressed to this party so far."""
        return self._inbox_fn()

    def send(self, receiver: Role, mtype: str, payload) -> None:
        self._deliver(self.role, receiver, mtype, payload)


def run_protocol(
    setting: Setting,
    alice_strategy: Callable,
    bob_strategy: Callable,
    referee_strategy: Callable,
    inputs: dict[Role, object],
    rng: RngStream,
    transport=None,
    shared_randomness: bool = False,
    run_id: str = "run",
    meta: dict | None = None,
) -> Transcript:
    """Execute the three strategies under the setting; return the validated
    transcript. Deterministic given (seed, setting, strategies)."""
    transport = transport or InprocTransport()
    shared = rng.child(STREAM_SHARED) if shared_randomness else None
    transcript = Transcript(
        setting=setting,
        shared_seed=(shared.seed, shared.path) if shared is not None else None,
    )
    allowed = _EDGES[setting.name]
    seq = [0]  # current round counter; hello is round 0

    def through_wire(sender, receiver, ptype, payload, round_):
        frame = make_frame(run_id, round_, sender.value, receiver.value, ptype, payload)
        line = transport.exchange(encode_frame(frame))
        from .wire import decode_frame

        back = decode_frame(line)
        return back, len(line.encode("utf-8"))

    hello = dict(meta or {})
    hello["setting"] = setting.name
    if shared is not None:
        hello["shared_seed"] = [shared.seed, list(shared.path)]
    through_wire(Role.REFEREE, Role.REFEREE, "hello", hello, 0)

    def deliver(sender: Role, receiver: Role, mtype: str, payload):
        if sender == receiver:
            raise ProtocolViolation(f"{sender.value} cannot message itself")
        if (sender, receiver) not in allowed:
            raise ProtocolViolation(
                f"{sender.value}→{receiver.value} not allowed in {setting.name}"
            )
        if setting.name in ("smp", "oneway"):
            if any(m.sender == sender for m in transcript.messages):
                raise ProtocolViolation(
                    f"second message from {sender.value} in {setting.name}"
                )
        seq[0] += 1
        back, nbytes = through_wire(sender, receiver, mtype, payload, seq[0])
        transcript.messages.append(
            Message(
                round=back["round"],
                sender=Role(back["from"]),
                receiver=Role(back["to"]),
                mtype=back["type"],
                payload=decode_payload(back["type"], back["payload"]),
                nbytes=nbytes,
            )
        )

    def inbox_for(role: Role) -> list[Message]:
        return [m for m in transcript.messages if m.receiver == role]

    def ctx(role: Role, stream_idx: int) -> PartyContext:
        return PartyContext(
            role, inputs.get(role), rng.child(stream_idx), shared,
            lambda: inbox_for(role), deliver,
        )

    if isinstance(setting, Smp):
        alice_strategy(ctx(Role.ALICE, STREAM_ALICE))
        bob_strategy(ctx(Role.BOB, STREAM_BOB))
    elif isinstance(setting, OneWay):
        alice_strategy(ctx(Role.ALICE, STREAM_ALICE))
        bob_strategy(ctx(Role.BOB, STREAM_BOB))
    else:
        actx = ctx(Role.ALICE, STREAM_ALICE)
        bctx = ctx(Role.BOB, STREAM_BOB)
        for turn in range(setting.max_rounds):
            before = len(transcript.messages)
            (alice_strategy if turn % 2 == 0 else bob_strategy)(
                actx if turn % 2 == 0 else bctx
            )
            sent = transcript.messages[before:]
            if not sent or any(m.receiver == Role.REFEREE for m in sent):
                break

    transcript.result = referee_strategy(ctx(Role.REFEREE, STREAM_REFEREE))
    seq[0] += 1
    through_wire(Role.REFEREE, Role.REFEREE, "result", _jsonable(transcript.result), seq[0])

    verdict = validate_transcript(transcript)
    if verdict != "ok":
        raise ProtocolViolation(verdict)
    return transcript


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def validate_transcript(t: Transcript) -> str:
    """Return "ok" or a description of the first violation found."""
    allowed = _EDGES[t.setting.name]
    last_round = 0
    for m in t.messages:
        if m.sender == m.receiver:
            return f"message from {m.sender.value} to itself"
        if (m.sender, m.receiver) not in allowed:
            return f"{_edge_label(m)} not allowed in {t.setting.name.upper()}"
        if m.round < last_round:
            return f"round numbers decrease at round {m.round}"
        last_round = m.round

    if isinstance(t.setting, Smp):
        for who in (Role.ALICE, Role.BOB):
            n = sum(1 for m in t.messages if m.sender == who)
            if n != 1:
                return f"{who.value} sent {n} messages in SMP, expected 1"
    elif isinstance(t.setting, OneWay):
        edges = [(m.sender, m.receiver) for m in t.messages]
        if edges != [(Role.ALICE, Role.BOB), (Role.BOB, Role.REFEREE)]:
            return "one-way requires exactly A→B then B→Referee"
    else:
        chat = [m for m in t.messages if m.receiver != Role.REFEREE]
        reports = [m for m in t.messages if m.receiver == Role.REFEREE]
        if len(chat) > t.setting.max_rounds:
            return (
                f"{len(chat)} alternations exceed max_rounds={t.setting.max_rounds}"
            )
        for i, m in enumerate(chat):
            want = Role.ALICE if i % 2 == 0 else Role.BOB
            if m.sender != want:
                return f"alternation broken at message {i}: {m.sender.value} sent twice"
        if len(reports) > 1:
            return "more than one report to the referee"
        if reports and t.messages[-1] is not reports[0]:
            return "report to the referee must be the last message"
    return "ok"


def _edge_label(m: Message) -> str:
    short = {Role.ALICE: "A", Role.BOB: "B", Role.REFEREE: "Referee"}
    return f"{short[m.sender]}→{short[m.receiver]}"


def transcript_cost(t: Transcript) -> tuple[int, int]:
    """(message count, total bytes on the wire)."""
    return len(t.messages), sum(m.nbytes for m in t.messages)


# --- canned strategies for the two estimation protocols ---


def multicopy_smp_strategies(k: int):
    """SMP strategies reproducing the multi-copy estimator bit for bit."""
    from .estimators import multicopy_constants
    from .linalg import PureState, overlap2
    from .symmetric import standard_povm_sample

    def party(ctx: PartyContext):
        u = standard_povm_sample(ctx.input, k, ctx.rng)
        ctx.send(Role.REFEREE, "state_vector", u.amplitudes)

    def referee(ctx: PartyContext):
        by_sender = {m.sender: m.payload for m in ctx.inbox}
        u = PureState(by_sender[Role.ALICE])
        v = PureState(by_sender[Role.BOB])
        x = overlap2(u, v)
        c = multicopy_constants(u.dim, k)
        return {"w": c.slope * x - c.offset, "raw": x}

    return party, party, referee


def singlecopy_smp_strategies(d: int, n_bases: int, m: int):
    """SMP strategies reproducing the single-copy estimator bit for bit.

    Requires shared randomness (the measurement bases)."""
    import numpy as np

    from .estimators import born_sample, classical_collision
    from .linalg import sample_haar_unitary

    def party(ctx: PartyContext):
        rho = ctx.input.density() if hasattr(ctx.input, "density") else ctx.input
        outcomes = []
        for i in range(n_bases):
            u = sample_haar_unitary(d, ctx.shared.child(i))
            outcomes.extend(int(b) for b in born_sample(rho, u, m, ctx.rng.child(i)))
        ctx.send(Role.REFEREE, "outcomes", outcomes)

    def referee(ctx: PartyContext):
        by_sender = {m_.sender: np.asarray(m_.payload) for m_ in ctx.inbox}
        xs = by_sender[Role.ALICE].reshape(n_bases, m)
        ys = by_sender[Role.BOB].reshape(n_bases, m)
        vals = np.empty(n_bases)
        raws = np.empty(n_bases)
        for i in range(n_bases):
            g = classical_collision(xs[i], ys[i])
            raws[i] = g
            vals[i] = (d + 1) * g - 1.0
        return {"w": float(vals.mean()), "raw": float(raws.mean())}

    return party, party, referee


def pi0_oneway_strategies(k: int):
    """One-way decider: Alice sends her POVM outcome, Bob tests his copies
    against it and reports the case label."""
    from .estimators import dipe_decide_pi0
    from .linalg import PureState
    from .symmetric import standard_povm_sample

    def alice(ctx: PartyContext):
        u = standard_povm_sample(ctx.input, k, ctx.rng)
        ctx.send(Role.BOB, "state_vector", u.amplitudes)

    def bob(ctx: PartyContext):
        u = PureState(ctx.inbox[0].payload)
        case = dipe_decide_pi0(u, ctx.input, k, ctx.rng)
        ctx.send(Role.REFEREE, "scalar", float(case))

    def referee(ctx: PartyContext):
        return {"case": int(ctx.inbox[0].payload)}

    return alice, bob, referee
