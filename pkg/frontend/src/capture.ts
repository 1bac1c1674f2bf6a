/**
 * Camera capture loop: grabs video frames, downscales to the configured
 * frame size, and emits raw RGB frame messages at most fpsCap per second.
 * Pauses while the tab is hidden. Frames go out un-mirrored; mirroring is
 * a preview-only transform.
 */

import { encodeFrameMessage, rgbaToRgb, SendGate } from "./protocol.js";
import type { Settings } from "./state.js";

export interface CaptureHandlers {
  onFrame: (message: ArrayBuffer) => void;
  onCameraError: (message: string) => void;
}

export class CaptureLoop {
  private video: HTMLVideoElement;
  private scratch: HTMLCanvasElement;
  private stream: MediaStream | null = null;
  private gate: SendGate;
  private running = false;
  private rafId: number | null = null;
  private startedAt = 0;
  framesSent = 0;

  constructor(private settings: Settings, private handlers: CaptureHandlers) {
    this.video = document.createElement("video");
    this.video.playsInline = true;
    this.video.muted = true;
    this.scratch = document.createElement("canvas");
    this.gate = new SendGate(settings.fpsCap);
  }

  get videoElement(): HTMLVideoElement {
    return this.video;
  }

  updateSettings(settings: Settings): void {
    this.settings = settings;
    this.gate.setCap(settings.fpsCap);
  }

  async start(): Promise<boolean> {
    try {
      this.stream = await navigator.mediaDevices.getUserMedia({
        video: { width: { ideal: 640 }, height: { ideal: 480 } },
        audio: false,
      });
    } catch (err) {
      this.handlers.onCameraError(
        err instanceof Error ? err.message : "camera permission denied"
      );
      return false;
    }
    this.video.srcObject = this.stream;
    await this.video.play();
    this.running = true;
    this.startedAt = performance.now();
    this.tick();
    return true;
  }

  private tick = (): void => {
    if (!this.running) return;
    this.rafId = requestAnimationFrame(this.tick);
    if (document.hidden) return; // paused while the tab is not visible
    if (this.video.readyState < 2) return;
    const now = performance.now();
    if (!this.gate.trySend(now)) return;

    const { frameW, frameH } = this.settings;
    if (this.scratch.width !== frameW) this.scratch.width = frameW;
    if (this.scratch.height !== frameH) this.scratch.height = frameH;
    const ctx = this.scratch.getContext("2d", { willReadFrequently: true });
    if (!ctx) return;
    ctx.drawImage(this.video, 0, 0, frameW, frameH);
    const rgba = ctx.getImageData(0, 0, frameW, frameH).data;
    const message = encodeFrameMessage(
      rgbaToRgb(rgba),
      frameW,
      frameH,
      now - this.startedAt
    );
    this.framesSent += 1;
    this.handlers.onFrame(message);
  };

  stop(): void {
    this.running = false;
    if (this.rafId !== null) cancelAnimationFrame(this.rafId);
    this.stream?.getTracks().forEach((t) => t.stop());
    this.stream = null;
  }
}
