"""Line-oriented JSON wire format for protocol messages.

Each frame is one JSON object per line:
{"v": 1, "run": ..., "round": ..., "from": ..., "to": ..., "type": ...,
 "payload": ...}
with complex amplitudes encoded as [re, im] pairs. Floats round-trip bit
for bit through the encoder (json emits repr of the double), so an
in-process transport is equivalent to running the computation directly.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading

import numpy as np

WIRE_VERSION = 1

FRAME_TYPES = ("hello", "state_vector", "outcomes", "scalar", "result")


class WireError(ValueError):
    """Malformed frame or payload."""


def encode_payload(ptype: str, payload) -> object:
    if ptype == "state_vector":
        arr = np.asarray(payload, dtype=complex)
        return [[float(z.real), float(z.imag)] for z in arr]
    if ptype == "outcomes":
        return [int(x) for x in payload]
    if ptype == "scalar":
        return float(payload)
    if ptype in ("hello", "result"):
        return payload
    raise WireError(f"unknown payload type {ptype!r}")


def decode_payload(ptype: str, payload) -> object:
    if ptype == "state_vector":
        return np.array([complex(re, im) for re, im in payload])
    if ptype == "outcomes":
        return np.array(payload, dtype=np.int64)
    if ptype == "scalar":
        return float(payload)
    if ptype in ("hello", "result"):
        return payload
    raise WireError(f"unknown payload type {ptype!r}")


def make_frame(run: str, round_: int, sender: str, receiver: str, ptype: str, payload) -> dict:
    if ptype not in FRAME_TYPES:
        raise WireError(f"unknown frame type {ptype!r}")
    return {
        "v": WIRE_VERSION,
        "run": run,
        "round": round_,
        "from": sender,
        "to": receiver,
        "type": ptype,
        "payload": encode_payload(ptype, payload),
    }


def encode_frame(frame: dict) -> str:
    return json.dumps(frame, sort_keys=True, separators=(",", ":"))


def decode_frame(line: str) -> dict:
    try:
        frame = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"bad frame: {exc}") from exc
    for key in ("v", "run", "round", "from", "to", "type", "payload"):
        if key not in frame:
            raise WireError(f"frame missing {key!r}")
    if frame["v"] != WIRE_VERSION:
        raise WireError(f"unsupported wire version {frame['v']}")
    if frame["type"] not in FRAME_TYPES:
        raise WireError(f"unknown frame type {frame['type']!r}")
    return frame


class InprocTransport:
    """Encode/decode round trip without leaving the process."""

    name = "inproc"

    def exchange(self, line: str) -> str:
        # decode to validate, then hand the canonical encoding back
        return encode_frame(decode_frame(line))

    def close(self) -> None:
        pass


class TcpTransport:
    """Sends each frame line to a collector that echoes it back."""

    def __init__(self, addr: str):
        host, _, port = addr.rpartition(":")
        if not host or not port.isdigit():
            raise WireError(f"bad tcp address {addr!r}; expected host:port")
        self.name = f"tcp:{addr}"
        self._sock = socket.create_connection((host, int(port)), timeout=10.0)
        self._reader = self._sock.makefile("r", encoding="utf-8", newline="\n")

    def exchange(self, line: str) -> str:
        self._sock.sendall((line + "\n").encode("utf-8"))
        echoed = self._reader.readline()
        if not echoed:
            raise WireError("collector closed the connection")
        return echoed.rstrip("\n")

    def close(self) -> None:
        try:
            self._reader.close()
        finally:
            self._sock.close()


def open_transport(spec: str):
    """Transport factory: "inproc" or "tcp:<host>:<port>"."""
    if spec == "inproc":
        return InprocTransport()
    if spec.startswith("tcp:"):
        return TcpTransport(spec[4:])
    raise WireError(f"unknown transport {spec!r}")


class _EchoHandler(socketserver.StreamRequestHandler):
    def handle(self):
        for raw in self.rfile:
            line = raw.decode("utf-8").rstrip("\n")
            if not line:
                continue
            frame = decode_frame(line)  # collectors reject malformed frames
            self.server.frames.append(frame)
            self.wfile.write((encode_frame(frame) + "\n").encode("utf-8"))


class FrameCollectorServer:
    """Threaded line server that validates, logs, and echoes frames.

    Used by the tcp transport tests and by the CLI's tcp mode peer.
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = _Server((host, port), _EchoHandler)
        self._server.frames = []
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def address(self) -> str:
        host, port = self._server.server_address[:2]
        return f"{host}:{port}"

    @property
    def frames(self) -> list:
        return self._server.frames

    def start(self) -> "FrameCollectorServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
