"""Real-time bridge: one simulated rig behind the framed link.

The TCP listener carries raw frame bytes; the WebSocket endpoint /link (on
its own port) carries the same frame text, one frame per message. A single
simulation loop paces ticks to wall-clock dt, drains inbound commands at
tick boundaries, answers each with its ACK/NAK, and broadcasts telemetry
and event frames to every connection.

Session rule: the first connection to say HELLO owns the rig; HELLO or any
command from another connection is refused with NAK ... BUSY until the
owner disconnects. After the owner aborts the mission and disconnects, the
bridge shuts down.
"""

import itertools
import logging
import queue
import socket
import threading
import time

from websockets.sync.server import serve as ws_serve

from .mission import MissionRunner
from .protocol import (
    CommandError,
    FrameParser,
    encode_frame,
    event_frame_body,
    nak_body,
    parse_command,
)

log = logging.getLogger("paintrig.bridge")

# Event kinds forwarded to clients as EVENT frames (telemetry goes out as
# TELEM frames, ack/nak go only to the commanding client).
_BROADCAST_KINDS = ("mode", "obstacle", "fault", "wall", "column", "burst", "end")


class _Client:
    """One connection, transport-agnostic: a send callable plus liveness."""

    _ids = itertools.count(1)

    def __init__(self, send, close, label: str):
        self.id = next(self._ids)
        self._send = send
        self._close = close
        self.label = label
        self.alive = True
        self._lock = threading.Lock()

    def send_body(self, body: str):
        if not self.alive:
            return
        try:
            with self._lock:
                self._send(encode_frame(body))
        except Exception:
            self.alive = False

    def close(self):
        self.alive = False
        try:
            self._close()
        except Exception:
            pass


class Bridge:
    """Hosts a MissionRunner behind TCP + WebSocket framed links."""

    def __init__(self, scenario, port: int = 8765, ws_port=None, host: str = "0.0.0.0"):
        self.runner = MissionRunner(scenario)
        self._dt_s = scenario.dt_ms / 1000.0
        self._inbox = queue.Queue()
        self._clients = {}
        self._owner_id = None
        self._reg_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads = []
        self._event_cursor = 0

        self._tcp_sock = socket.create_server((host, port))
        self._tcp_sock.settimeout(0.2)
        self.tcp_port = self._tcp_sock.getsockname()[1]
        if ws_port is None:
            ws_port = self.tcp_port + 1
        self._ws_server = ws_serve(self._ws_handler, host, ws_port)
        self.ws_port = self._ws_server.socket.getsockname()[1]

    # --- connection plumbing -------------------------------------------

    def _register(self, client: _Client):
        with self._reg_lock:
            self._clients[client.id] = client
        log.info("client %s connected (%s)", client.id, client.label)

    def _unregister(self, client: _Client):
        client.alive = False
        with self._reg_lock:
            self._clients.pop(client.id, None)
            was_owner = self._owner_id == client.id
            if was_owner:
                self._owner_id = None
        log.info("client %s disconnected", client.id)
        if was_owner and self.runner.state.aborted:
            # Operator aborted and hung up: mission over, stop serving.
            self._stop.set()

    def _accept_loop(self):
        while not self._stop.is_set():
            try:
                sock, addr = self._tcp_sock.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            sock.settimeout(0.2)
            client = _Client(
                send=sock.sendall,
                close=sock.close,
                label=f"tcp {addr[0]}:{addr[1]}",
            )
            self._register(client)
            t = threading.Thread(
                target=self._tcp_reader, args=(sock, client), daemon=True
            )
            t.start()
            self._threads.append(t)

    def _tcp_reader(self, sock, client: _Client):
        parser = FrameParser()
        try:
            while not self._stop.is_set() and client.alive:
                try:
                    data = sock.recv(4096)
                except socket.timeout:
                    continue
                except OSError:
                    break
                if not data:
                    break
                self._feed(parser, data, client)
        finally:
            client.close()
            self._unregister(client)

    def _ws_handler(self, conn):
        if conn.request.path != "/link":
            conn.close(code=1008, reason="unknown endpoint")
            return
        client = _Client(
            send=lambda data: conn.send(data.decode("ascii")),
            close=conn.close,
            label="ws",
        )
        self._register(client)
        parser = FrameParser()
        try:
            for message in conn:
                if isinstance(message, str):
                    message = message.encode("utf-8", "replace")
                self._feed(parser, message, client)
        except Exception:
            pass
        finally:
            self._unregister(client)

    def _feed(self, parser: FrameParser, data: bytes, client: _Client):
        frames, errors = parser.feed(data)
        for err in errors:
            log.warning("client %s framing error: %s", client.id, err)
        for fr in frames:
            self._inbox.put((client, fr.body))

    # --- command dispatch (sim-loop thread only) ------------------------

    def _dispatch(self, client: _Client, body: str):
        try:
            cmd = parse_command(body)
        except CommandError as e:
            client.send_body(nak_body(e.verb, e.reason))
            return
        if cmd.kind == "HELLO":
            if self._owner_id is None or self._owner_id == client.id:
                self._owner_id = client.id
            else:
                client.send_body(nak_body("HELLO", "BUSY"))
                return
        elif self._owner_id != client.id:
            client.send_body(nak_body(cmd.verb, "BUSY"))
            return
        response = self.runner.inject(cmd)
        verb_and_rest = response.detail
        status = "ACK" if response.kind == "ack" else "NAK"
        client.send_body(f"{status} {verb_and_rest}")

    def _broadcast_new_events(self):
        events = self.runner.events
        with self._reg_lock:
            clients = list(self._clients.values())
        while self._event_cursor < len(events):
            ev = events[self._event_cursor]
            self._event_cursor += 1
            if ev.kind == "telem":
                body = ev.detail
            elif ev.kind in _BROADCAST_KINDS:
                body = event_frame_body(ev.kind.upper(), ev.detail)
            else:
                continue
            for c in clients:
                c.send_body(body)

    # --- lifecycle -------------------------------------------------------

    def serve_forever(self):
        """Run the paced sim loop until stop() or ABORT+disconnect."""
        acceptor = threading.Thread(target=self._accept_loop, daemon=True)
        acceptor.start()
        self._threads.append(acceptor)
        ws_thread = threading.Thread(target=self._ws_server.serve_forever, daemon=True)
        ws_thread.start()
        self._threads.append(ws_thread)

        deadline = time.monotonic()
        try:
            while not self._stop.is_set():
                deadline += self._dt_s
                while True:
                    try:
                        client, body = self._inbox.get_nowait()
                    except queue.Empty:
                        break
                    self._dispatch(client, body)
                self.runner.step()
                self._broadcast_new_events()
                pause = deadline - time.monotonic()
                if pause > 0:
                    if self._stop.wait(pause):
                        break
                else:
                    deadline = time.monotonic()  # fell behind: drop lost time
        finally:
            self.stop()

    def stop(self):
        self._stop.set()
        try:
            self._tcp_sock.close()
        except OSError:
            pass
        self._ws_server.shutdown()
        with self._reg_lock:
            clients = list(self._clients.values())
        for c in clients:
            c.close()
