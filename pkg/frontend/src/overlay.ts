/**
 * Rendering: camera preview with the red tip marker, and the white drawing
 * panel with the growing stroke. Every stroke vertex comes from a server
 * point event; this module only draws what the state holds.
 */

import type { StrokePoint } from "./protocol.js";
import type { Settings, UiState } from "./state.js";

const MARK_COLOR = "#FF0000";

export function renderPreview(
  canvas: HTMLCanvasElement,
  video: HTMLVideoElement,
  state: UiState,
  settings: Settings
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.save();
  if (settings.mirrorPreview) {
    ctx.translate(canvas.width, 0);
    ctx.scale(-1, 1);
  }
  if (video.readyState >= 2) {
    ctx.drawImage(video, 0, 0, canvas.width, canvas.height);
  } else {
    ctx.fillStyle = "#222";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
  }
  if (state.tip) {
    // tip is in frame coordinates; scale to the preview canvas
    const x = (state.tip.fx / (settings.frameW - 1)) * (canvas.width - 1);
    const y = (state.tip.fy / (settings.frameH - 1)) * (canvas.height - 1);
    const r = Math.max(2, settings.tipHalfwidth * (canvas.width / settings.frameW));
    ctx.beginPath();
    ctx.arc(x, y, r, 0, Math.PI * 2);
    ctx.fillStyle = MARK_COLOR;
    ctx.fill();
  }
  ctx.restore();
}

export interface PanelGeometry {
  screenW: number;
  screenH: number;
}

/** Draw the white panel with the in-progress stroke and the latest tip dot. */
export function renderPanel(
  canvas: HTMLCanvasElement,
  state: UiState,
  settings: Settings,
  geometry: PanelGeometry
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.fillStyle = "#FFFFFF";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const sx = canvas.width / geometry.screenW;
  const sy = canvas.height / geometry.screenH;
  drawPolyline(ctx, state.currentStroke, sx, sy, 2 * settings.tipHalfwidth + 1);
  if (state.tip) {
    ctx.beginPath();
    ctx.arc(state.tip.sx * sx, state.tip.sy * sy, Math.max(2, settings.tipHalfwidth * sx), 0, Math.PI * 2);
    ctx.fillStyle = MARK_COLOR;
    ctx.fill();
  }
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  points: StrokePoint[],
  sx: number,
  sy: number,
  thickness: number
): void {
  if (points.length === 0) return;
  ctx.strokeStyle = MARK_COLOR;
  ctx.fillStyle = MARK_COLOR;
  ctx.lineWidth = Math.max(1, thickness * sx);
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  if (points.length === 1) {
    ctx.beginPath();
    ctx.arc(points[0].sx * sx, points[0].sy * sy, ctx.lineWidth / 2, 0, Math.PI * 2);
    ctx.fill();
    return;
  }
  ctx.beginPath();
  ctx.moveTo(points[0].sx * sx, points[0].sy * sy);
  for (let i = 1; i < points.length; i++) {
    ctx.lineTo(points[i].sx * sx, points[i].sy * sy);
  }
  ctx.stroke();
}
