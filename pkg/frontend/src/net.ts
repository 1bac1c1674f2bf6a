/** Websocket client with automatic reconnect and exponential backoff. */

import { parseServerEvent, ServerEvent } from "./protocol.js";

export interface DrawSocketHandlers {
  onEvent: (event: ServerEvent) => void;
  onStatus: (status: "connecting" | "open" | "closed") => void;
}

const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 8000;

export class DrawSocket {
  private ws: WebSocket | null = null;
  private backoffMs = BACKOFF_START_MS;
  private closedByUser = false;
  private reconnectTimer: number | null = null;

  constructor(private url: string, private handlers: DrawSocketHandlers) {}

  connect(): void {
    this.closedByUser = false;
    this.handlers.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.binaryType = "arraybuffer";
    this.ws.onopen = () => {
      this.backoffMs = BACKOFF_START_MS;
      this.handlers.onStatus("open");
    };
    this.ws.onmessage = (msg: MessageEvent) => {
      if (typeof msg.data === "string") {
        this.handlers.onEvent(parseServerEvent(msg.data));
      }
    };
    this.ws.onclose = () => {
      this.ws = null;
      this.handlers.onStatus("closed");
      if (!this.closedByUser) this.scheduleReconnect();
    };
    this.ws.onerror = () => {
      // onclose follows and handles the retry
    };
  }

  private scheduleReconnect(): void {
    if (this.reconnectTimer !== null) return;
    this.reconnectTimer = window.setTimeout(() => {
      this.reconnectTimer = null;
      this.connect();
    }, this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
  }

  get isOpen(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  /** Send one binary frame; returns false when the socket is not open. */
  sendFrame(message: ArrayBuffer): boolean {
    if (!this.isOpen || this.ws === null) return false;
    this.ws.send(message);
    return true;
  }

  /** Ask the server to end the current session now. */
  flush(): void {
    if (this.isOpen && this.ws !== null) this.ws.send("flush");
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer !== null) {
      window.clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.ws?.close();
  }
}
