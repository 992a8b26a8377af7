// Pure layout: a state frame plus the session hello become pixel-space
// primitives for two orthographic views, the belief list and the channel
// gauges. No canvas calls here, so every coordinate is unit-testable.

import { HelloPayload, StatePayload, Vec3 } from './protocol.js'

export const MARGIN = 10
export const TOP_SPLIT = 0.62 // fraction of the width used by the top view

export interface Marker {
  kind: 'object' | 'pad' | 'rigid' | 'ee' | 'bin' | 'workspace'
  id: string
  px: number
  py: number
  r: number
  count?: number
  attached?: boolean
  w?: number
  h?: number
}

export interface BeliefBar {
  label: string
  p: number
  pct: number // displayed percentage, 1 decimal
  w: number // bar width in px
  isMap: boolean
}

export interface Gauge {
  label: string
  frac: number
  text: string
  zeroFrac?: number
}

export interface SceneLayout {
  top: Marker[]
  side: Marker[]
  bars: BeliefBar[]
  gauges: Gauge[]
  banner: string | null
}

interface Mapping {
  ox: number
  oy: number
  s: number
}

export function topMapping(hello: HelloPayload, W: number, H: number): Mapping {
  const ws = hello.scenario.workspace
  const rect = { x: MARGIN, y: MARGIN, w: Math.floor(W * TOP_SPLIT) - 2 * MARGIN, h: H - 2 * MARGIN }
  const dx = ws.max[0] - ws.min[0]
  const dy = ws.max[1] - ws.min[1]
  const s = Math.min(rect.w / dx, rect.h / dy)
  return { ox: rect.x + (rect.w - dx * s) / 2, oy: rect.y + (rect.h - dy * s) / 2, s }
}

export function sideMapping(hello: HelloPayload, W: number, H: number): Mapping {
  const ws = hello.scenario.workspace
  const x0 = Math.floor(W * TOP_SPLIT) + MARGIN
  const rect = { x: x0, y: MARGIN, w: W - x0 - MARGIN, h: Math.floor(H * 0.4) - MARGIN }
  const dx = ws.max[0] - ws.min[0]
  const dz = ws.max[2] - ws.min[2]
  const s = Math.min(rect.w / dx, rect.h / dz)
  return { ox: rect.x + (rect.w - dx * s) / 2, oy: rect.y + (rect.h - dz * s) / 2, s }
}

export function mapTop(hello: HelloPayload, m: Mapping, x: number, y: number): [number, number] {
  const ws = hello.scenario.workspace
  return [m.ox + (x - ws.min[0]) * m.s, m.oy + (ws.max[1] - y) * m.s]
}

export function mapSide(hello: HelloPayload, m: Mapping, x: number, z: number): [number, number] {
  const ws = hello.scenario.workspace
  return [m.ox + (x - ws.min[0]) * m.s, m.oy + (ws.max[2] - z) * m.s]
}

function objectRadius(hello: HelloPayload, id: string): number {
  const obj = hello.scenario.objects.find((o) => o.id === id)
  return obj ? obj.contact_radius : 0.01
}

export function layoutScene(
  hello: HelloPayload,
  state: StatePayload,
  W: number,
  H: number,
  staleMs = 0,
): SceneLayout {
  const tm = topMapping(hello, W, H)
  const sm = sideMapping(hello, W, H)
  const ws = hello.scenario.workspace
  const bin = hello.scenario.bin
  const top: Marker[] = []
  const side: Marker[] = []

  const [wx0, wy0] = mapTop(hello, tm, ws.min[0], ws.max[1])
  const [wx1, wy1] = mapTop(hello, tm, ws.max[0], ws.min[1])
  top.push({ kind: 'workspace', id: 'ws', px: wx0, py: wy0, r: 0, w: wx1 - wx0, h: wy1 - wy0 })
  const [bx0, by0] = mapTop(hello, tm, bin.min[0], bin.max[1])
  const [bx1, by1] = mapTop(hello, tm, bin.max[0], bin.min[1])
  top.push({ kind: 'bin', id: 'bin', px: bx0, py: by0, r: 0, w: bx1 - bx0, h: by1 - by0 })

  for (const g of state.objects) {
    const [px, py] = mapTop(hello, tm, g.pose[0], g.pose[1])
    top.push({
      kind: 'object',
      id: g.key,
      px,
      py,
      r: Math.max(2, objectRadius(hello, g.id) * tm.s),
      count: g.count,
      attached: g.attached,
    })
    const [sx, sy] = mapSide(hello, sm, g.pose[0], g.pose[2])
    side.push({
      kind: 'object',
      id: g.key,
      px: sx,
      py: sy,
      r: Math.max(2, objectRadius(hello, g.id) * sm.s),
      count: g.count,
      attached: g.attached,
    })
  }

  const ee = state.ee
  const gp = hello.scenario.gripper
  for (const g of gp.grasp_types) {
    const fx = ee[0] + g.offset[0]
    const fy = ee[1] + g.offset[1]
    const fz = ee[2] + g.offset[2]
    if (g.tag === 'rigid') {
      const [px, py] = mapTop(hello, tm, fx, fy)
      top.push({ kind: 'rigid', id: g.tag, px, py, r: 3, w: gp.stroke * tm.s })
      const [sx, sy] = mapSide(hello, sm, fx, fz)
      side.push({ kind: 'rigid', id: g.tag, px: sx, py: sy, r: 3, w: gp.stroke * sm.s })
    } else {
      const [px, py] = mapTop(hello, tm, fx, fy)
      top.push({ kind: 'pad', id: g.tag, px, py, r: gp.pad_radius * tm.s })
      const [sx, sy] = mapSide(hello, sm, fx, fz)
      side.push({ kind: 'pad', id: g.tag, px: sx, py: sy, r: Math.max(2, gp.pad_radius * sm.s) })
    }
  }
  const [ex, ey] = mapTop(hello, tm, ee[0], ee[1])
  top.push({ kind: 'ee', id: 'ee', px: ex, py: ey, r: 4 })
  const [esx, esy] = mapSide(hello, sm, ee[0], ee[2])
  side.push({ kind: 'ee', id: 'ee', px: esx, py: esy, r: 4 })

  // belief: sorted descending, ties by label; MAP pair highlighted
  const entries = Object.entries(state.belief).sort(
    (a, b) => b[1] - a[1] || a[0].localeCompare(b[0]),
  )
  const barMax = W - Math.floor(W * TOP_SPLIT) - 3 * MARGIN
  const bars: BeliefBar[] = entries.slice(0, 10).map(([label, p], i) => ({
    label,
    p,
    pct: Math.round(p * 1000) / 10,
    w: Math.round(p * barMax),
    isMap: i === 0,
  }))

  const gauges: Gauge[] = [
    {
      label: 'f',
      frac: state.f / gp.f_max,
      text: `${state.f.toFixed(1)} / ${gp.f_max.toFixed(0)} N`,
    },
    {
      label: 'P',
      frac: (state.P - gp.p_min) / (gp.p_max - gp.p_min),
      text: `${state.P.toFixed(1)} psi  [${gp.p_min}, ${gp.p_max}]`,
      zeroFrac: (0 - gp.p_min) / (gp.p_max - gp.p_min),
    },
  ]

  return {
    top,
    side,
    bars,
    gauges,
    banner: staleMs > 1000 ? `disconnected (${(staleMs / 1000).toFixed(1)}s stale)` : null,
  }
}

/** Sum of the displayed percentages; equals 100 up to per-entry rounding. */
export function displayedBeliefTotal(state: StatePayload): number {
  return Object.values(state.belief)
    .map((p) => Math.round(p * 1000) / 10)
    .reduce((a, b) => a + b, 0)
}
