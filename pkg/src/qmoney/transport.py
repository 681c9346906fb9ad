"""Bank endpoints (in-process and TCP), the session driver, and the server.

Both endpoints speak the same line-delimited wire format; the in-process
endpoint round-trips every message through the codec so transcripts come
out byte-identical to the TCP path under the same seeds.
"""

from __future__ import annotations

import logging
import socket
import socketserver
import threading

from .money import BankDb
from .protocol import (
    FROM_BANK,
    TO_BANK,
    BankSession,
    CoinRetired,
    InsufficientUnmarked,
    Message,
    ProtocolAbort,
    Transcript,
    Verdict,
    WireError,
    decode_message,
    encode_message,
)
from .seeding import spawn_rng

log = logging.getLogger("qmoney.bank")


class TransportError(RuntimeError):
    """Connection or framing failure before a verdict was reached."""


class LocalBank:
    """In-process bank endpoint; one BankSession per opened session."""

    def __init__(self, db: BankDb, seed: int) -> None:
        self.db = db
        self.seed = seed
        self._session_index = 0
        self._lock = threading.Lock()

    def open_session(self) -> "LocalChannel":
        with self._lock:
            index = self._session_index
            self._session_index += 1
        rng = spawn_rng(self.seed, "bank", index)
        return LocalChannel(BankSession(self.db, rng))


class LocalChannel:
    def __init__(self, session: BankSession) -> None:
        self.session = session

    def exchange(self, msg: Message) -> Message:
        # round-trip through the codec so both transports see identical bytes
        line = encode_message(msg)
        try:
            decoded = decode_message(line)
            reply = self.session.handle(decoded)
        except (WireError, ProtocolAbort) as exc:
            raise TransportError(str(exc)) from exc
        return decode_message(encode_message(reply))

    def close(self) -> None:
        pass


class RemoteBank:
    """TCP bank endpoint: one connection per session."""

    def __init__(self, host: str, port: int, timeout: float = 30.0) -> None:
        self.host = host
        self.port = port
        self.timeout = timeout

    def open_session(self) -> "RemoteChannel":
        try:
            sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        except OSError as exc:
            raise TransportError(f"cannot connect to {self.host}:{self.port}: {exc}") from exc
        return RemoteChannel(sock)


class RemoteChannel:
    def __init__(self, sock: socket.socket) -> None:
        self.sock = sock
        self.reader = sock.makefile("r", encoding="utf-8", newline="\n")

    def exchange(self, msg: Message) -> Message:
        line = encode_message(msg) + "\n"
        try:
            self.sock.sendall(line.encode("utf-8"))
            reply = self.reader.readline()
        except OSError as exc:
            raise TransportError(f"connection failed: {exc}") from exc
        if not reply:
            raise TransportError("connection closed by bank")
        try:
            return decode_message(reply.rstrip("\n"))
        except WireError as exc:
            raise TransportError(f"bad reply from bank: {exc}") from exc

    def close(self) -> None:
        try:
            self.reader.close()
            self.sock.close()
        except OSError:
            pass


def run_session(channel, holder) -> tuple[bool, Transcript]:
    """Drive one full session; returns (verdict, transcript)."""
    transcript = Transcript()

    def step(msg: Message) -> Message:
        transcript.record(TO_BANK, msg)
        reply = channel.exchange(msg)
        transcript.record(FROM_BANK, reply)
        return reply

    reply = step(holder.init_message())
    if isinstance(reply, Verdict):
        return reply.valid, transcript
    subset = holder.on_challenge(reply)
    reply = step(subset)
    if isinstance(reply, Verdict):
        return reply.valid, transcript
    answers = holder.on_queries(reply)
    reply = step(answers)
    if not isinstance(reply, Verdict):
        raise TransportError(f"expected verdict, got {type(reply).__name__}")
    return reply.valid, transcript


def run_ver(bank, holder_factory, retries: int = 3) -> tuple[bool, Transcript]:
    """Run the verification protocol end to end.

    ``bank`` is an endpoint (LocalBank or RemoteBank); ``holder_factory``
    builds a fresh holder driver per attempt. Retries the whole protocol
    up to ``retries`` times when the holder cannot supply enough unmarked
    positions.
    """
    attempts = 0
    while True:
        attempts += 1
        holder = holder_factory()
        channel = bank.open_session()
        try:
            return run_session(channel, holder)
        except InsufficientUnmarked:
            if attempts > retries:
                raise
        finally:
            channel.close()


# ---------------------------------------------------------------------------
# TCP server.
# ---------------------------------------------------------------------------


class _SessionHandler(socketserver.StreamRequestHandler):
    timeout = 30.0

    def handle(self) -> None:
        server: BankServer = self.server  # type: ignore[assignment]
        rng = spawn_rng(server.seed, "bank", server.next_session_index())
        session = BankSession(server.db, rng)
        while True:
            try:
                raw = self.rfile.readline()
            except (OSError, socket.timeout):
                return
            if not raw:
                return
            try:
                line = raw.decode("utf-8").rstrip("\n")
                msg = decode_message(line)
                reply = session.handle(msg)
            except (WireError, ProtocolAbort, UnicodeDecodeError) as exc:
                log.info("session aborted: %s", exc)
                return
            out = encode_message(reply) + "\n"
            try:
                self.wfile.write(out.encode("utf-8"))
            except OSError:
                return
            if isinstance(reply, Verdict):
                log.info(
                    "coin=%s valid=%s",
                    session.coin_id,
                    "true" if reply.valid else "false",
                )
                return


class BankServer(socketserver.ThreadingTCPServer):
    """Serves one verification session per connection."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, db: BankDb, seed: int, host: str = "127.0.0.1", port: int = 0) -> None:
        self.db = db
        self.seed = seed
        self._session_counter = 0
        self._counter_lock = threading.Lock()
        super().__init__((host, port), _SessionHandler)

    def next_session_index(self) -> int:
        with self._counter_lock:
            index = self._session_counter
            self._session_counter += 1
        return index

    @property
    def port(self) -> int:
        return self.server_address[1]


def start_server(db: BankDb, seed: int, host: str = "127.0.0.1", port: int = 0) -> BankServer:
    """Start a bank server on a background thread; caller shuts it down."""
    server = BankServer(db, seed, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


__all__ = [
    "BankServer",
    "CoinRetired",
    "LocalBank",
    "RemoteBank",
    "TransportError",
    "run_session",
    "run_ver",
    "start_server",
]
