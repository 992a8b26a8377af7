// v1 wire protocol: versioned JSON envelopes over a WebSocket.
// Validators are hand-rolled so the browser bundle stays dependency-free.

export const PROTOCOL_VERSION = 1

export type Vec3 = [number, number, number]

export interface InputPayload {
  aH: Vec3
  df: number
  dP: number
}

export interface ObjectState {
  id: string
  key: string
  pose: Vec3
  count: number
  attached: boolean
  grasp: string | null
}

export interface StatePayload {
  tick: number
  time: number
  ee: Vec3
  f: number
  P: number
  objects: ObjectState[]
  belief: Record<string, number>
  aH: Vec3
  aR: Vec3
  a: Vec3
  events: unknown[]
  terminal: string | null
}

export interface ScenarioObject {
  id: string
  pose: Vec3
  mass: number
  contact_radius: number
  width: number
  count: number
}

export interface HelloPayload {
  mode: string
  alpha: number
  beta: number
  dt: number
  v_max: number
  seed: number
  lockstep: boolean
  scenario_hash: string
  scenario: {
    name: string
    objects: ScenarioObject[]
    workspace: { min: Vec3; max: Vec3 }
    bin: { min: Vec3; max: Vec3 }
    gripper: {
      grasp_types: { tag: string; offset: Vec3 }[]
      pad_radius: number
      stroke: number
      f_max: number
      p_min: number
      p_max: number
    }
  }
}

export interface MetricsPayload {
  success_rate: number
  grasp_time: number
  grasp_distance: number
  input_time: number
}

export type ServerFrame =
  | { v: 1; type: 'hello'; payload: HelloPayload }
  | { v: 1; type: 'state'; payload: StatePayload }
  | { v: 1; type: 'metrics'; payload: MetricsPayload }
  | { v: 1; type: 'error'; payload: { code: string; msg: string } }

export class ProtocolError extends Error {}

function fail(msg: string): never {
  throw new ProtocolError(msg)
}

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every((x) => typeof x === 'number' && isFinite(x))
}

export function makeInputFrame(aH: Vec3, df: number, dP: number): { v: 1; type: 'input'; payload: InputPayload } {
  return { v: 1, type: 'input', payload: { aH, df, dP } }
}

export function validateInputFrame(frame: unknown): InputPayload {
  if (typeof frame !== 'object' || frame === null) fail('input frame must be an object')
  const f = frame as Record<string, unknown>
  if (f.v !== PROTOCOL_VERSION) fail(`bad version ${String(f.v)}`)
  if (f.type !== 'input') fail(`bad type ${String(f.type)}`)
  const p = f.payload as Record<string, unknown>
  if (typeof p !== 'object' || p === null) fail('missing payload')
  if (!isVec3(p.aH)) fail('aH must be a finite 3-vector')
  if (typeof p.df !== 'number' || !isFinite(p.df)) fail('df must be a finite number')
  if (typeof p.dP !== 'number' || !isFinite(p.dP)) fail('dP must be a finite number')
  return { aH: p.aH, df: p.df, dP: p.dP }
}

export function parseServerFrame(raw: string): ServerFrame {
  let data: unknown
  try {
    data = JSON.parse(raw)
  } catch {
    fail('frame is not JSON')
  }
  if (typeof data !== 'object' || data === null) fail('frame must be an object')
  const f = data as Record<string, unknown>
  if (f.v !== PROTOCOL_VERSION) fail(`unsupported protocol version ${String(f.v)}`)
  const payload = f.payload as Record<string, unknown>
  if (typeof payload !== 'object' || payload === null) fail('missing payload')
  switch (f.type) {
    case 'hello': {
      const p = payload as unknown as HelloPayload
      if (typeof p.dt !== 'number' || typeof p.v_max !== 'number') fail('hello: missing dt/v_max')
      if (typeof p.scenario !== 'object') fail('hello: missing scenario')
      return { v: 1, type: 'hello', payload: p }
    }
    case 'state': {
      const p = payload as unknown as StatePayload
      if (typeof p.tick !== 'number' || !isVec3(p.ee)) fail('state: missing tick/ee')
      if (typeof p.f !== 'number' || typeof p.P !== 'number') fail('state: missing channels')
      if (!Array.isArray(p.objects)) fail('state: missing objects')
      for (const o of p.objects) {
        if (typeof o.id !== 'string' || !isVec3(o.pose) || typeof o.count !== 'number') {
          fail('state: malformed object entry')
        }
      }
      if (typeof p.belief !== 'object' || p.belief === null) fail('state: missing belief')
      return { v: 1, type: 'state', payload: p }
    }
    case 'metrics':
      return { v: 1, type: 'metrics', payload: payload as unknown as MetricsPayload }
    case 'error': {
      const p = payload as Record<string, unknown>
      if (typeof p.code !== 'string') fail('error: missing code')
      return { v: 1, type: 'error', payload: payload as { code: string; msg: string } }
    }
    default:
      fail(`unknown frame type ${String(f.type)}`)
  }
}
