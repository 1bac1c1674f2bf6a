import { describe, expect, it } from "vitest";
import {
  encodeFrameMessage,
  frameIntervalMs,
  HEADER_BYTES,
  parseServerEvent,
  rgbaToRgb,
  SendGate,
} from "../src/protocol.js";

describe("encodeFrameMessage", () => {
  it("writes a 17-byte big-endian header followed by the payload", () => {
    const rgb = new Uint8Array([10, 20, 30, 40, 50, 60]); // 2x1 frame
    const buf = encodeFrameMessage(rgb, 2, 1, 1234);
    expect(buf.byteLength).toBe(HEADER_BYTES + 6);
    const view = new DataView(buf);
    expect(view.getUint8(0)).toBe(1); // raw type
    expect(view.getUint32(1, false)).toBe(2);
    expect(view.getUint32(5, false)).toBe(1);
    expect(view.getBigUint64(9, false)).toBe(1234n);
    expect(Array.from(new Uint8Array(buf, HEADER_BYTES))).toEqual([10, 20, 30, 40, 50, 60]);
  });

  it("rounds fractional timestamps", () => {
    const buf = encodeFrameMessage(new Uint8Array(3), 1, 1, 83.33);
    expect(new DataView(buf).getBigUint64(9, false)).toBe(83n);
  });

  it("rejects payloads that do not match the dimensions", () => {
    expect(() => encodeFrameMessage(new Uint8Array(5), 2, 1, 0)).toThrow();
  });
});

describe("rgbaToRgb", () => {
  it("drops the alpha channel", () => {
    const rgba = new Uint8ClampedArray([1, 2, 3, 255, 4, 5, 6, 128]);
    expect(Array.from(rgbaToRgb(rgba))).toEqual([1, 2, 3, 4, 5, 6]);
  });
});

describe("parseServerEvent", () => {
  it("accepts every known event type", () => {
    const detection = parseServerEvent(
      '{"type":"detection","seq":1,"frame_index":0,"tip":null,"dropped_frames":0}'
    );
    expect(detection.type).toBe("detection");
    const point = parseServerEvent(
      '{"type":"point","seq":3,"session_id":"c1-s1","point":{"sx":1,"sy":2,"fx":3,"fy":4,"t_ms":5}}'
    );
    expect(point.type === "point" && point.point.sx).toBe(1);
  });

  it("rejects unknown event types", () => {
    expect(() => parseServerEvent('{"type":"mystery","seq":1}')).toThrow();
  });
});

describe("SendGate", () => {
  it("enforces the fps cap over a simulated run", () => {
    const gate = new SendGate(12);
    let sent = 0;
    for (let now = 0; now < 5000; now += 5) {
      if (gate.trySend(now)) sent += 1;
    }
    expect(sent).toBeLessThanOrEqual(60); // 12 fps for 5 s
    expect(sent).toBeGreaterThanOrEqual(58);
  });

  it("allows the first frame immediately", () => {
    const gate = new SendGate(12);
    expect(gate.trySend(0)).toBe(true);
    expect(gate.trySend(10)).toBe(false);
    expect(gate.trySend(84)).toBe(true);
  });

  it("honors cap changes", () => {
    const gate = new SendGate(1);
    expect(gate.trySend(0)).toBe(true);
    gate.setCap(100);
    expect(gate.trySend(20)).toBe(true);
  });

  it("rejects a non-positive cap", () => {
    expect(() => frameIntervalMs(0)).toThrow();
  });
});
