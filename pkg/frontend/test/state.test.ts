import { describe, expect, it } from "vitest";
import type { ServerEvent, StrokePoint } from "../src/protocol.js";
import { applyServerEvent, initialState, resetForReconnect } from "../src/state.js";

function pt(i: number): StrokePoint {
  return { sx: i * 10, sy: i * 5, fx: i, fy: i, t_ms: i * 83 };
}

function pointEvent(seq: number, i: number): ServerEvent {
  return { type: "point", seq, session_id: "c1-s1", point: pt(i) };
}

describe("applyServerEvent", () => {
  it("builds the current stroke from point events in seq order", () => {
    const state = initialState();
    applyServerEvent(state, { type: "session_start", seq: 1, session_id: "c1-s1", t_ms: 0 });
    applyServerEvent(state, pointEvent(2, 1));
    applyServerEvent(state, pointEvent(3, 2));
    applyServerEvent(state, pointEvent(4, 3));
    expect(state.currentSessionId).toBe("c1-s1");
    expect(state.currentStroke.map((p) => p.fx)).toEqual([1, 2, 3]);
  });

  it("ignores stale or duplicate seq numbers", () => {
    const state = initialState();
    applyServerEvent(state, { type: "session_start", seq: 1, session_id: "c1-s1", t_ms: 0 });
    applyServerEvent(state, pointEvent(2, 1));
    applyServerEvent(state, pointEvent(2, 99)); // duplicate seq: dropped
    applyServerEvent(state, pointEvent(1, 98)); // stale seq: dropped
    expect(state.currentStroke.map((p) => p.fx)).toEqual([1]);
  });

  it("moves the stroke to finished on session_end and clears the canvas state", () => {
    const state = initialState();
    applyServerEvent(state, { type: "session_start", seq: 1, session_id: "c1-s1", t_ms: 0 });
    applyServerEvent(state, pointEvent(2, 1));
    applyServerEvent(state, {
      type: "session_end",
      seq: 3,
      session_id: "c1-s1",
      stroke: {
        session_id: "c1-s1",
        frame_size: [320, 240],
        screen_size: [1920, 1080],
        thickness: 11,
        points: [pt(1)],
      },
    });
    expect(state.finished).toHaveLength(1);
    expect(state.finished[0].sessionId).toBe("c1-s1");
    expect(state.currentStroke).toEqual([]);
    expect(state.currentSessionId).toBeNull();
  });

  it("tracks detections, tips, and drop counters", () => {
    const state = initialState();
    applyServerEvent(state, {
      type: "detection",
      seq: 1,
      frame_index: 0,
      tip: { fx: 10, fy: 20, sx: 100, sy: 200 },
      dropped_frames: 2,
    });
    expect(state.tip).toEqual({ fx: 10, fy: 20, sx: 100, sy: 200 });
    expect(state.detectionsReceived).toBe(1);
    expect(state.droppedFrames).toBe(2);
    applyServerEvent(state, {
      type: "detection",
      seq: 2,
      frame_index: 1,
      tip: null,
      dropped_frames: 2,
    });
    expect(state.tip).toBeNull();
  });

  it("records server errors", () => {
    const state = initialState();
    applyServerEvent(state, { type: "error", seq: 1, message: "bad header" });
    expect(state.lastError).toBe("bad header");
  });

  it("keeps finished strokes across reconnects but resets live fields", () => {
    const state = initialState();
    applyServerEvent(state, { type: "session_start", seq: 1, session_id: "c1-s1", t_ms: 0 });
    applyServerEvent(state, pointEvent(2, 1));
    applyServerEvent(state, {
      type: "session_end",
      seq: 3,
      session_id: "c1-s1",
      stroke: {
        session_id: "c1-s1",
        frame_size: [320, 240],
        screen_size: [1920, 1080],
        thickness: 11,
        points: [pt(1)],
      },
    });
    resetForReconnect(state);
    expect(state.finished).toHaveLength(1);
    expect(state.lastSeq).toBe(0);
    expect(state.currentStroke).toEqual([]);
    // a fresh server stream starting at seq 1 is accepted again
    applyServerEvent(state, { type: "session_start", seq: 1, session_id: "c2-s1", t_ms: 0 });
    expect(state.currentSessionId).toBe("c2-s1");
  });
});
