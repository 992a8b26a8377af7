// Device state -> one input payload per tick.
//
// Keyboard: WASD/arrows move in the table plane, R/F move up/down, Q/E pump
// the adhesive pressure down/up (the bumper analog), Z/X squeeze/relax the
// pinch force. Gamepad: left stick xy, triggers z, bumpers dP, face buttons df.

import { InputPayload, Vec3 } from './protocol.js'

export interface InputConfig {
  v_max: number
  dp_rate: number // psi per tick while a bumper is held
  df_rate: number // N per tick while squeezing
  deadzone: number // stick fraction ignored (default 5%)
}

export const DEFAULT_RATES = { dp_rate: 2.0, df_rate: 4.0, deadzone: 0.05 }

export interface GamepadSnapshot {
  axes: number[]
  buttons: boolean[] // pressed flags, standard mapping
  triggers: [number, number] // LT, RT in [0, 1]
}

function axisFromKeys(keys: Set<string>, minus: string[], plus: string[]): number {
  // opposing keys cancel exactly
  const neg = minus.some((k) => keys.has(k)) ? 1 : 0
  const pos = plus.some((k) => keys.has(k)) ? 1 : 0
  return pos - neg
}

function applyDeadzone(v: number, deadzone: number): number {
  return Math.abs(v) < deadzone ? 0 : v
}

export function mapInput(
  keys: Set<string>,
  pad: GamepadSnapshot | null,
  cfg: InputConfig,
): InputPayload {
  // screen axes in the top view: +x right (D), +y up (W)
  let x = axisFromKeys(keys, ['KeyA', 'ArrowLeft'], ['KeyD', 'ArrowRight'])
  let y = axisFromKeys(keys, ['KeyS', 'ArrowDown'], ['KeyW', 'ArrowUp'])
  let z = axisFromKeys(keys, ['KeyF'], ['KeyR'])
  let dP = axisFromKeys(keys, ['KeyQ'], ['KeyE']) * cfg.dp_rate
  let df = axisFromKeys(keys, ['KeyX'], ['KeyZ']) * cfg.df_rate

  if (pad) {
    // stick up is negative in browser convention
    x += applyDeadzone(pad.axes[0] ?? 0, cfg.deadzone)
    y += applyDeadzone(-(pad.axes[1] ?? 0), cfg.deadzone)
    z += applyDeadzone(pad.triggers[1] - pad.triggers[0], cfg.deadzone)
    if (pad.buttons[4]) dP -= cfg.dp_rate // left bumper: more vacuum
    if (pad.buttons[5]) dP += cfg.dp_rate // right bumper: release
    if (pad.buttons[0]) df += cfg.df_rate // A: squeeze
    if (pad.buttons[1]) df -= cfg.df_rate // B: relax
  }

  let aH: Vec3 = [x * cfg.v_max, y * cfg.v_max, z * cfg.v_max]
  const norm = Math.hypot(aH[0], aH[1], aH[2])
  if (norm > cfg.v_max) {
    const s = cfg.v_max / norm
    aH = [aH[0] * s, aH[1] * s, aH[2] * s]
  }
  return { aH, df, dP }
}

export function isActive(p: InputPayload): boolean {
  return p.aH.some((v) => v !== 0) || p.df !== 0 || p.dP !== 0
}

/** Tracks currently held keys from DOM events. */
export class KeyboardState {
  keys = new Set<string>()

  attach(target: { addEventListener: Window['addEventListener'] }): void {
    target.addEventListener('keydown', (ev) => this.keys.add((ev as KeyboardEvent).code))
    target.addEventListener('keyup', (ev) => this.keys.delete((ev as KeyboardEvent).code))
    target.addEventListener('blur', () => this.keys.clear())
  }
}

export function snapshotGamepad(gp: Gamepad | null): GamepadSnapshot | null {
  if (!gp) return null
  return {
    axes: Array.from(gp.axes),
    buttons: gp.buttons.map((b) => b.pressed),
    triggers: [gp.buttons[6]?.value ?? 0, gp.buttons[7]?.value ?? 0],
  }
}
