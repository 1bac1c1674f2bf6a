/**
 * UI state and the server-event reducer.
 *
 * The client never computes tips itself: the current stroke grows only
 * through server "point" events, applied strictly in sequence order.
 */

import type { ServerEvent, StrokeExport, StrokePoint } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed" | "error";

export interface Settings {
  frameW: number;
  frameH: number;
  fpsCap: number;
  mirrorPreview: boolean;
  tipHalfwidth: number;
}

export const DEFAULT_SETTINGS: Settings = {
  frameW: 320,
  frameH: 240,
  fpsCap: 12,
  mirrorPreview: true,
  tipHalfwidth: 5,
};

export interface FinishedStroke {
  sessionId: string;
  stroke: StrokeExport;
}

export interface UiState {
  connection: ConnectionStatus;
  lastSeq: number;
  tip: { fx: number; fy: number; sx: number; sy: number } | null;
  currentSessionId: string | null;
  currentStroke: StrokePoint[];
  finished: FinishedStroke[];
  framesSent: number;
  detectionsReceived: number;
  droppedFrames: number;
  lastError: string | null;
}

export function initialState(): UiState {
  return {
    connection: "connecting",
    lastSeq: 0,
    tip: null,
    currentSessionId: null,
    currentStroke: [],
    finished: [],
    framesSent: 0,
    detectionsReceived: 0,
    droppedFrames: 0,
    lastError: null,
  };
}

/**
 * Fold one server event into the state.
 *
 * Events whose seq does not advance past lastSeq are ignored; vertex order
 * of the current stroke therefore always equals server sequence order.
 */
export function applyServerEvent(state: UiState, event: ServerEvent): UiState {
  if (event.seq <= state.lastSeq) return state;
  state.lastSeq = event.seq;
  switch (event.type) {
    case "detection":
      state.detectionsReceived += 1;
      state.tip = event.tip;
      state.droppedFrames = event.dropped_frames;
      break;
    case "session_start":
      state.currentSessionId = event.session_id;
      state.currentStroke = [];
      break;
    case "point":
      state.currentStroke.push(event.point);
      break;
    case "session_end":
      state.finished.push({ sessionId: event.session_id, stroke: event.stroke });
      state.currentSessionId = null;
      state.currentStroke = [];
      break;
    case "error":
      state.lastError = event.message;
      break;
  }
  return state;
}

/** Reset per-connection fields after a reconnect (server seq starts over). */
export function resetForReconnect(state: UiState): void {
  state.lastSeq = 0;
  state.tip = null;
  state.currentSessionId = null;
  state.currentStroke = [];
}
