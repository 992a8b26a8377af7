// Thin canvas painter for a SceneLayout; everything interesting happens in
// scene.ts.

import { SceneLayout, Marker } from './scene.js'

const COLORS: Record<string, string> = {
  workspace: '#2a2f36',
  bin: '#3c5a3c',
  object: '#c9a227',
  pad: '#5a8fd4',
  rigid: '#d46a5a',
  ee: '#eeeeee',
}

function drawMarker(ctx: CanvasRenderingContext2D, m: Marker) {
  ctx.strokeStyle = COLORS[m.kind] ?? '#888'
  ctx.fillStyle = COLORS[m.kind] ?? '#888'
  if (m.kind === 'workspace' || m.kind === 'bin') {
    ctx.lineWidth = m.kind === 'bin' ? 2 : 1
    ctx.strokeRect(m.px, m.py, m.w ?? 0, m.h ?? 0)
    return
  }
  if (m.kind === 'rigid') {
    ctx.lineWidth = 2
    ctx.beginPath()
    ctx.moveTo(m.px, m.py - (m.w ?? 0) / 2)
    ctx.lineTo(m.px, m.py + (m.w ?? 0) / 2)
    ctx.stroke()
    ctx.beginPath()
    ctx.arc(m.px, m.py, m.r, 0, Math.PI * 2)
    ctx.stroke()
    return
  }
  ctx.lineWidth = m.attached ? 3 : 1.5
  ctx.beginPath()
  ctx.arc(m.px, m.py, m.r, 0, Math.PI * 2)
  if (m.kind === 'object') {
    ctx.globalAlpha = m.attached ? 0.9 : 0.6
    ctx.fill()
    ctx.globalAlpha = 1
    if ((m.count ?? 1) > 1) {
      ctx.fillStyle = '#fff'
      ctx.font = '10px monospace'
      ctx.fillText(String(m.count), m.px + m.r + 2, m.py - 2)
    }
  } else {
    ctx.stroke()
  }
}

export function renderScene(
  canvas: HTMLCanvasElement,
  layout: SceneLayout,
  labels: { mode: string; tick: number; time: number },
): void {
  const ctx = canvas.getContext('2d')
  if (!ctx) return
  const W = canvas.width
  const H = canvas.height
  ctx.fillStyle = '#14171c'
  ctx.fillRect(0, 0, W, H)

  for (const m of layout.top) drawMarker(ctx, m)
  for (const m of layout.side) drawMarker(ctx, m)

  // belief bars
  const x0 = Math.floor(W * 0.62) + 10
  let y = Math.floor(H * 0.45)
  ctx.font = '11px monospace'
  for (const bar of layout.bars) {
    ctx.fillStyle = bar.isMap ? '#7fd47f' : '#4a6b8a'
    ctx.fillRect(x0, y, bar.w, 10)
    ctx.fillStyle = '#ccc'
    ctx.fillText(`${bar.label} ${bar.pct.toFixed(1)}%`, x0 + 2, y + 9 + 11)
    y += 26
    if (y > H - 80) break
  }

  // gauges
  let gy = H - 60
  for (const g of layout.gauges) {
    ctx.fillStyle = '#333'
    ctx.fillRect(x0, gy, 160, 12)
    ctx.fillStyle = '#7fd4c8'
    ctx.fillRect(x0, gy, Math.max(0, Math.min(1, g.frac)) * 160, 12)
    if (g.zeroFrac !== undefined) {
      ctx.fillStyle = '#fff'
      ctx.fillRect(x0 + g.zeroFrac * 160 - 1, gy - 2, 2, 16)
    }
    ctx.fillStyle = '#ccc'
    ctx.fillText(`${g.label}: ${g.text}`, x0 + 166, gy + 10)
    gy += 24
  }

  ctx.fillStyle = '#aaa'
  ctx.fillText(
    `${labels.mode}  tick ${labels.tick}  t=${labels.time.toFixed(2)}s`,
    10,
    H - 6,
  )

  if (layout.banner) {
    ctx.fillStyle = '#d45a5a'
    ctx.font = '16px monospace'
    ctx.fillText(layout.banner, W / 2 - 100, 24)
  }
}
