// Boot: read host/port from the query string, connect, pump inputs at the
// session control rate, render the freshest frame.

import { connectSession } from './client.js'
import { DEFAULT_RATES, KeyboardState, mapInput, snapshotGamepad } from './input.js'
import { layoutScene } from './scene.js'
import { renderScene } from './render.js'

function qs(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback
}

function boot(): void {
  const host = qs('host', '127.0.0.1')
  const port = qs('port', '8765')
  const canvas = document.getElementById('scene') as HTMLCanvasElement
  const status = document.getElementById('status') as HTMLElement

  const keyboard = new KeyboardState()
  keyboard.attach(window)

  let dirty = true
  const client = connectSession(`ws://${host}:${port}`, () => {
    dirty = true
  })

  let inputTimer: number | null = null
  const startInputPump = () => {
    if (inputTimer !== null || !client.hello) return
    const dtMs = client.hello.dt * 1000
    inputTimer = window.setInterval(() => {
      if (!client.hello) return
      const pad = snapshotGamepad(navigator.getGamepads ? navigator.getGamepads()[0] : null)
      const p = mapInput(keyboard.keys, pad, {
        v_max: client.hello.v_max,
        ...DEFAULT_RATES,
      })
      client.sendInput(p)
    }, dtMs)
  }

  document.getElementById('reset')?.addEventListener('click', () => client.sendReset())
  document.getElementById('mode')?.addEventListener('change', (ev) => {
    client.setMode((ev.target as HTMLSelectElement).value)
  })

  const draw = () => {
    startInputPump()
    if (client.hello && client.latestState) {
      const stale = client.connected ? performance.now() - client.lastFrameAt : 1e9
      const layout = layoutScene(
        client.hello,
        client.latestState,
        canvas.width,
        canvas.height,
        stale,
      )
      renderScene(canvas, layout, {
        mode: client.hello.mode,
        tick: client.latestState.tick,
        time: client.latestState.time,
      })
      const m = client.metrics
      status.textContent = m
        ? `done: success ${m.success_rate.toFixed(0)}%  time/obj ${m.grasp_time.toFixed(1)}s`
        : client.lastError ?? (client.connected ? 'live' : 'connecting...')
    }
    requestAnimationFrame(draw)
  }
  requestAnimationFrame(draw)
}

window.addEventListener('DOMContentLoaded', boot)
