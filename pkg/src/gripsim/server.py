"""Live teleoperation service: one operator drives a session over a WebSocket.

Frames are JSON text with a versioned envelope {v, type, payload}. The
session loop is the same object the headless runner uses; the server merely
feeds it the most recently received input once per tick (zero-order latch).
In real-time mode ticks follow wall-clock dt; in lockstep mode each input
frame advances exactly one tick, which makes socket-driven runs reproduce
headless runs bit for bit.
"""

from __future__ import annotations

import asyncio
import json
import logging

from websockets.asyncio.server import serve

from . import session as session_mod
from .scenario import Scenario, scenario_hash, scenario_to_json
from .session import SessionLoop, TickRecord, compute_metrics
from .world import OperatorInput, ZERO_INPUT

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1


def _frame(type_: str, payload: dict) -> str:
    return json.dumps({"v": PROTOCOL_VERSION, "type": type_, "payload": payload})


def state_payload(loop: SessionLoop, rec: TickRecord | None) -> dict:
    """Snapshot of the live session for the UI."""
    st = loop.state
    payload = {
        "tick": st.tick,
        "time": st.time,
        "ee": [st.ee.x, st.ee.y, st.ee.z],
        "f": st.f,
        "P": st.pressure,
        "objects": [
            {
                "id": g.object_id,
                "key": g.key,
                "pose": list(g.pose.as_tuple()),
                "count": g.count,
                "attached": g.held_by is not None,
                "grasp": g.held_by,
            }
            for g in st.groups
        ],
        "belief": loop.belief.as_flat_dict(),
        "terminal": loop.terminal,
    }
    if rec is not None:
        payload["aH"] = list(rec.input.a_h)
        payload["aR"] = list(rec.a_r)
        payload["a"] = list(rec.a)
        payload["events"] = [session_mod._event_to_json(ev) for ev in rec.events]
    else:
        payload["aH"] = [0.0, 0.0, 0.0]
        payload["aR"] = [0.0, 0.0, 0.0]
        payload["a"] = [0.0, 0.0, 0.0]
        payload["events"] = []
    return payload


def hello_payload(server: "TeleopServer") -> dict:
    sc = server.scenario
    return {
        "mode": server.session.mode,
        "alpha": server.session.alpha,
        "beta": sc.assist.beta,
        "dt": sc.physics.dt,
        "v_max": sc.physics.v_max,
        "seed": server.seed,
        "lockstep": server.lockstep,
        "scenario_hash": scenario_hash(sc),
        "scenario": scenario_to_json(sc),
    }


class TeleopServer:
    """Single-session teleoperation service; one operator at a time."""

    def __init__(
        self,
        scenario: Scenario,
        mode: str = "shared",
        seed: int = 0,
        host: str = "127.0.0.1",
        port: int = 8765,
        lockstep: bool = False,
        log_path: str | None = None,
    ) -> None:
        self.scenario = scenario
        self.mode = mode
        self.seed = seed
        self.host = host
        self.port = port
        self.lockstep = lockstep
        self.log_path = log_path
        self.session = SessionLoop(scenario, mode=mode, seed=seed)
        self.latched = ZERO_INPUT
        self.client = None
        self._log_fh = None
        self._metrics_sent = False
        self.bound_port: int | None = None

    # -- logging ----------------------------------------------------------

    def _open_log(self) -> None:
        if self.log_path is None:
            return
        if self._log_fh is not None:
            self._log_fh.close()
        self._log_fh = open(self.log_path, "w", encoding="utf-8")
        self._log_fh.write(json.dumps(session_mod.header_to_json(self.session.log)) + "\n")
        self._log_fh.flush()

    def _log_record(self, rec: TickRecord) -> None:
        if self._log_fh is None:
            return
        sc = self.scenario
        support = (
            tuple(o.id for o in sc.objects),
            tuple(g.tag for g in sc.gripper.grasp_types),
        )
        self._log_fh.write(json.dumps(session_mod.record_to_json(rec, support)) + "\n")
        self._log_fh.flush()

    def _close_log(self) -> None:
        if self._log_fh is not None:
            self._log_fh.write(
                json.dumps({"kind": "end", "terminal": self.session.log.terminal}) + "\n"
            )
            self._log_fh.flush()
            self._log_fh.close()
            self._log_fh = None

    # -- session control ---------------------------------------------------

    def _reset(self, mode: str | None = None) -> None:
        if self._log_fh is not None:
            self._close_log()
        if mode is not None:
            self.mode = mode
        self.session = SessionLoop(self.scenario, mode=self.mode, seed=self.seed)
        self.latched = ZERO_INPUT
        self._metrics_sent = False
        self._open_log()

    async def _tick_once(self) -> None:
        if self.session.terminal is not None:
            return
        rec = self.session.tick(self.latched)
        self._log_record(rec)
        if self.client is not None:
            await self.client.send(_frame("state", state_payload(self.session, rec)))
        if self.session.terminal is not None:
            self._close_log()
            await self._send_metrics()

    async def _send_metrics(self) -> None:
        if self.client is None or self._metrics_sent:
            return
        self._metrics_sent = True
        await self.client.send(_frame("metrics", compute_metrics(self.session.log).as_json()))

    # -- protocol ----------------------------------------------------------

    async def _send_error(self, ws, code: str, msg: str) -> None:
        try:
            await ws.send(_frame("error", {"code": code, "msg": msg}))
        except Exception:
            pass

    async def _handle_frame(self, ws, raw) -> bool:
        """Apply one client frame; returns False when the connection must close."""
        try:
            frame = json.loads(raw)
            if not isinstance(frame, dict):
                raise ValueError("frame must be a JSON object")
        except ValueError as exc:
            await self._send_error(ws, "bad_frame", f"unparseable frame: {exc}")
            return True
        if frame.get("v") != PROTOCOL_VERSION:
            await self._send_error(
                ws, "version", f"protocol v{PROTOCOL_VERSION} required, got {frame.get('v')!r}"
            )
            return False
        ftype = frame.get("type")
        payload = frame.get("payload") or {}
        if ftype == "input":
            try:
                a_h = payload.get("aH", (0.0, 0.0, 0.0))
                self.latched = OperatorInput.make(
                    tuple(float(v) for v in a_h),
                    df=float(payload.get("df", 0.0)),
                    dp=float(payload.get("dP", 0.0)),
                    v_max=self.scenario.physics.v_max,
                )
            except (TypeError, ValueError) as exc:
                await self._send_error(ws, "bad_frame", f"bad input payload: {exc}")
                return True
            if self.lockstep:
                await self._tick_once()
        elif ftype == "reset":
            self._reset()
            await ws.send(_frame("state", state_payload(self.session, None)))
        elif ftype == "set_mode":
            mode = payload.get("mode")
            if mode not in ("human", "shared"):
                await self._send_error(ws, "bad_frame", f"unknown mode {mode!r}")
                return True
            self._reset(mode=mode)
            await ws.send(_frame("hello", hello_payload(self)))
            await ws.send(_frame("state", state_payload(self.session, None)))
        else:
            await self._send_error(ws, "bad_frame", f"unknown frame type {ftype!r}")
        return True

    async def _handler(self, ws) -> None:
        if self.client is not None:
            await self._send_error(ws, "busy", "another operator is connected")
            await ws.close()
            return
        self.client = ws
        log.info("operator connected")
        try:
            await ws.send(_frame("hello", hello_payload(self)))
            await ws.send(_frame("state", state_payload(self.session, None)))
            if self.session.terminal is not None:
                await self._send_metrics()
            async for raw in ws:
                if not await self._handle_frame(ws, raw):
                    await ws.close()
                    break
        finally:
            # Pausing, not ending: the episode resumes when a client returns.
            self.client = None
            log.info("operator disconnected; session paused")

    async def _ticker(self) -> None:
        dt = self.scenario.physics.dt
        loop = asyncio.get_running_loop()
        deadline = loop.time() + dt
        last_tick_at = None
        drift_worst = 0.0
        since_report = 0
        while True:
            await asyncio.sleep(max(0.0, deadline - loop.time()))
            deadline += dt
            if self.client is None or self.session.terminal is not None:
                # Paused or done: don't accumulate a tick debt.
                deadline = loop.time() + dt
                last_tick_at = None
                continue
            now = loop.time()
            if last_tick_at is not None:
                drift_worst = max(drift_worst, abs(now - last_tick_at - dt) / dt)
                since_report += 1
                if since_report >= max(1, int(5.0 / dt)):
                    # soft real-time check: report cadence slip, never assert
                    log.info("tick cadence: worst slip %.1f%% of dt", 100 * drift_worst)
                    drift_worst = 0.0
                    since_report = 0
            last_tick_at = now
            await self._tick_once()

    async def run(self, ready: asyncio.Event | None = None) -> None:
        self._open_log()
        try:
            async with serve(self._handler, self.host, self.port) as server:
                self.bound_port = (
                    server.sockets[0].getsockname()[1] if server.sockets else self.port
                )
                print(f"listening on ws://{self.host}:{self.bound_port}", flush=True)
                if ready is not None:
                    ready.set()
                if self.lockstep:
                    await asyncio.Future()  # ticks arrive with inputs
                else:
                    await self._ticker()
        finally:
            self._close_log()


async def drive_frames(
    url: str,
    inputs: list[dict],
    collect_states: bool = False,
) -> dict:
    """Protocol client: send prerecorded input frames in lockstep and return
    the final metrics payload (and optionally every state frame)."""
    from websockets.asyncio.client import connect

    states = []
    metrics = None
    async with connect(url) as ws:
        # hello + initial state
        hello = json.loads(await ws.recv())
        if hello.get("type") != "hello":
            raise RuntimeError(f"expected hello frame, got {hello.get('type')!r}")
        await ws.recv()
        for payload in inputs:
            await ws.send(_frame("input", payload))
            while True:
                frame = json.loads(await ws.recv())
                if frame["type"] == "state":
                    if collect_states:
                        states.append(frame["payload"])
                    if frame["payload"].get("terminal"):
                        continue  # metrics frame follows
                    break
                if frame["type"] == "metrics":
                    metrics = frame["payload"]
                    break
                if frame["type"] == "error":
                    raise RuntimeError(f"server error: {frame['payload']}")
            if metrics is not None:
                break
    return {"metrics": metrics, "states": states, "hello": hello["payload"]}
