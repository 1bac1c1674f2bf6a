/**
 * Wire protocol for the drawing service.
 *
 * Client -> server: binary frames with a 17-byte big-endian header
 * (u8 msgType, u32 width, u32 height, u64 timestampMs) followed by the
 * payload: raw RGB8 for type 1, an encoded PNG/JPEG for type 2.
 * Server -> client: JSON text events, each carrying a per-connection seq.
 */

export const MSG_RAW = 1;
export const MSG_ENCODED = 2;
export const HEADER_BYTES = 17;

export interface StrokePoint {
  sx: number;
  sy: number;
  fx: number;
  fy: number;
  t_ms: number;
}

export interface StrokeExport {
  session_id: string;
  frame_size: [number, number];
  screen_size: [number, number];
  thickness: number;
  points: StrokePoint[];
}

export type ServerEvent =
  | {
      type: "detection";
      seq: number;
      frame_index: number;
      tip: { fx: number; fy: number; sx: number; sy: number } | null;
      dropped_frames: number;
    }
  | { type: "session_start"; seq: number; session_id: string; t_ms: number }
  | { type: "point"; seq: number; session_id: string; point: StrokePoint }
  | { type: "session_end"; seq: number; session_id: string; stroke: StrokeExport }
  | { type: "error"; seq: number; message: string };

/** Serialize one raw RGB frame message; rgb must hold width*height*3 bytes. */
export function encodeFrameMessage(
  rgb: Uint8Array,
  width: number,
  height: number,
  timestampMs: number
): ArrayBuffer {
  if (rgb.length !== width * height * 3) {
    throw new Error(`payload is ${rgb.length} bytes, expected ${width * height * 3}`);
  }
  const buffer = new ArrayBuffer(HEADER_BYTES + rgb.length);
  const view = new DataView(buffer);
  view.setUint8(0, MSG_RAW);
  view.setUint32(1, width, false);
  view.setUint32(5, height, false);
  view.setBigUint64(9, BigInt(Math.max(0, Math.round(timestampMs))), false);
  new Uint8Array(buffer, HEADER_BYTES).set(rgb);
  return buffer;
}

/** Drop the alpha channel of canvas ImageData pixels. */
export function rgbaToRgb(rgba: Uint8ClampedArray): Uint8Array {
  const pixels = rgba.length / 4;
  const rgb = new Uint8Array(pixels * 3);
  for (let i = 0; i < pixels; i++) {
    rgb[i * 3] = rgba[i * 4];
    rgb[i * 3 + 1] = rgba[i * 4 + 1];
    rgb[i * 3 + 2] = rgba[i * 4 + 2];
  }
  return rgb;
}

/** Parse one server text message; throws on unknown event types. */
export function parseServerEvent(text: string): ServerEvent {
  const obj = JSON.parse(text);
  switch (obj.type) {
    case "detection":
    case "session_start":
    case "point":
    case "session_end":
    case "error":
      return obj as ServerEvent;
    default:
      throw new Error(`unknown server event type ${String(obj.type)}`);
  }
}

/** Minimum milliseconds between outgoing frames for a given cap. */
export function frameIntervalMs(fpsCap: number): number {
  if (fpsCap <= 0) throw new Error("fps cap must be positive");
  return 1000 / fpsCap;
}

/**
 * Decides when the capture loop may send, enforcing the fps cap.
 * Pure timing arithmetic so the cap is unit-testable without a camera.
 */
export class SendGate {
  private lastSent = -Infinity;

  constructor(private fpsCap: number) {}

  setCap(fpsCap: number): void {
    this.fpsCap = fpsCap;
  }

  /** True (and marks a send) when at least one frame interval has elapsed. */
  trySend(nowMs: number): boolean {
    if (nowMs - this.lastSent < frameIntervalMs(this.fpsCap)) return false;
    this.lastSent = nowMs;
    return true;
  }
}
