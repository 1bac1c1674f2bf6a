/** Application wiring: camera -> websocket -> state -> canvases. */

import { CaptureLoop } from "./capture.js";
import { DrawSocket } from "./net.js";
import { renderPanel, renderPreview } from "./overlay.js";
import {
  applyServerEvent,
  DEFAULT_SETTINGS,
  initialState,
  resetForReconnect,
  Settings,
  UiState,
} from "./state.js";

const serviceBase = `${location.protocol}//${location.hostname}:8000`;
const wsUrl = `${serviceBase.replace(/^http/, "ws")}/draw`;

const state: UiState = initialState();
const settings: Settings = { ...DEFAULT_SETTINGS };

const previewCanvas = byId<HTMLCanvasElement>("preview");
const panelCanvas = byId<HTMLCanvasElement>("panel");
const statusLine = byId<HTMLDivElement>("status");
const errorBox = byId<HTMLDivElement>("camera-error");
const retryButton = byId<HTMLButtonElement>("retry");
const flushButton = byId<HTMLButtonElement>("flush");
const finishedList = byId<HTMLUListElement>("finished");
const mirrorToggle = byId<HTMLInputElement>("mirror");
const fpsInput = byId<HTMLInputElement>("fps-cap");
const sizeSelect = byId<HTMLSelectElement>("frame-size");

let screenGeometry = { screenW: 1920, screenH: 1080 };
let renderedFinished = 0;

const socket = new DrawSocket(wsUrl, {
  onEvent: (event) => {
    applyServerEvent(state, event);
  },
  onStatus: (status) => {
    state.connection = status === "open" ? "open" : status;
    if (status === "connecting") resetForReconnect(state);
  },
});

const capture = new CaptureLoop(settings, {
  onFrame: (message) => {
    if (socket.sendFrame(message)) state.framesSent += 1;
  },
  onCameraError: (message) => {
    state.connection = "error";
    errorBox.textContent = `Camera unavailable: ${message}`;
    errorBox.hidden = false;
  },
});

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

async function fetchScreenGeometry(): Promise<void> {
  try {
    const response = await fetch(`${serviceBase}/config`);
    const cfg = await response.json();
    screenGeometry = { screenW: cfg.screen.screen_w, screenH: cfg.screen.screen_h };
  } catch {
    // keep the default geometry; the panel scale is cosmetic
  }
}

function renderFinishedList(): void {
  if (state.finished.length === renderedFinished) return;
  for (; renderedFinished < state.finished.length; renderedFinished++) {
    const item = state.finished[renderedFinished];
    const li = document.createElement("li");
    li.textContent = `${item.sessionId} (${item.stroke.points.length} points) `;
    for (const format of ["json", "svg", "png"] as const) {
      const a = document.createElement("a");
      a.textContent = format;
      a.href = `${serviceBase}/sessions/${item.sessionId}/export?format=${format}`;
      a.download = `${item.sessionId}.${format === "json" ? "json" : format}`;
      a.className = "export";
      li.appendChild(a);
    }
    finishedList.appendChild(li);
  }
}

function renderLoop(): void {
  requestAnimationFrame(renderLoop);
  renderPreview(previewCanvas, capture.videoElement, state, settings);
  renderPanel(panelCanvas, state, settings, screenGeometry);
  renderFinishedList();
  statusLine.textContent =
    `${state.connection} | sent ${state.framesSent} | ` +
    `detections ${state.detectionsReceived} | dropped ${state.droppedFrames}` +
    (state.lastError ? ` | server error: ${state.lastError}` : "");
}

function applySettingsInputs(): void {
  settings.mirrorPreview = mirrorToggle.checked;
  settings.fpsCap = Math.max(1, Number(fpsInput.value) || DEFAULT_SETTINGS.fpsCap);
  const [w, h] = sizeSelect.value.split("x").map(Number);
  settings.frameW = w;
  settings.frameH = h;
  capture.updateSettings(settings);
}

async function boot(): Promise<void> {
  mirrorToggle.checked = settings.mirrorPreview;
  fpsInput.value = String(settings.fpsCap);
  sizeSelect.value = `${settings.frameW}x${settings.frameH}`;
  for (const el of [mirrorToggle, fpsInput, sizeSelect]) {
    el.addEventListener("change", applySettingsInputs);
  }
  retryButton.addEventListener("click", async () => {
    errorBox.hidden = true;
    if (await capture.start()) state.connection = "connecting";
  });
  flushButton.addEventListener("click", () => socket.flush());

  await fetchScreenGeometry();
  socket.connect();
  await capture.start();
  renderLoop();
}

boot();
