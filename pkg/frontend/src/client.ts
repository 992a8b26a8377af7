// WebSocket session client: keeps the freshest state frame, emits at most one
// input frame per control tick, surfaces staleness for the disconnect banner.

import {
  HelloPayload,
  InputPayload,
  MetricsPayload,
  StatePayload,
  makeInputFrame,
  parseServerFrame,
} from './protocol.js'

export interface SessionClient {
  hello: HelloPayload | null
  latestState: StatePayload | null
  metrics: MetricsPayload | null
  lastError: string | null
  lastFrameAt: number
  connected: boolean
  sendInput(p: InputPayload): void
  sendReset(): void
  setMode(mode: string): void
  close(): void
}

export function connectSession(
  url: string,
  onUpdate: () => void,
): SessionClient {
  const ws = new WebSocket(url)
  let lastSentTick = -1

  const client: SessionClient = {
    hello: null,
    latestState: null,
    metrics: null,
    lastError: null,
    lastFrameAt: 0,
    connected: false,
    sendInput(p: InputPayload) {
      if (ws.readyState !== WebSocket.OPEN || !client.hello) return
      // at most one input frame per tick: skip if the sim has not advanced
      const tick = client.latestState?.tick ?? 0
      if (client.hello.lockstep ? false : tick === lastSentTick) return
      lastSentTick = tick
      ws.send(JSON.stringify(makeInputFrame(p.aH, p.df, p.dP)))
    },
    sendReset() {
      if (ws.readyState === WebSocket.OPEN) ws.send(JSON.stringify({ v: 1, type: 'reset' }))
    },
    setMode(mode: string) {
      if (ws.readyState === WebSocket.OPEN) {
        ws.send(JSON.stringify({ v: 1, type: 'set_mode', payload: { mode } }))
      }
    },
    close() {
      ws.close()
    },
  }

  ws.onopen = () => {
    client.connected = true
    onUpdate()
  }
  ws.onclose = () => {
    client.connected = false
    onUpdate()
  }
  ws.onmessage = (ev) => {
    client.lastFrameAt = performance.now()
    try {
      const frame = parseServerFrame(String(ev.data))
      if (frame.type === 'hello') client.hello = frame.payload
      else if (frame.type === 'state') client.latestState = frame.payload
      else if (frame.type === 'metrics') client.metrics = frame.payload
      else if (frame.type === 'error') client.lastError = `${frame.payload.code}: ${frame.payload.msg}`
    } catch (err) {
      client.lastError = String(err)
    }
    onUpdate()
  }
  return client
}
