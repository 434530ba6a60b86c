// Thin reconnecting wrapper around the session websocket.

import type { ClientMessage, ServerMessage } from "./protocol.js";
import { parseServerMessage, serializeClientMessage } from "./protocol.js";

export interface SessionSocketOptions {
  room?: string;
  name?: string;
  onMessage: (msg: ServerMessage) => void;
  onStatus: (status: "connecting" | "open" | "closed") => void;
}

const RETRY_MS = 2000;

export class SessionSocket {
  private ws: WebSocket | null = null;
  private stopped = false;

  constructor(private readonly opts: SessionSocketOptions) {}

  connect(): void {
    if (this.stopped) return;
    this.opts.onStatus("connecting");
    const proto = location.protocol === "https:" ? "wss" : "ws";
    const room = encodeURIComponent(this.opts.room ?? "r0");
    const name = encodeURIComponent(this.opts.name ?? "anonymous");
    const url = `${proto}://${location.host}/session?room=${room}&role=pointer&name=${name}`;
    const ws = new WebSocket(url);
    this.ws = ws;

    ws.onopen = () => this.opts.onStatus("open");
    ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg) this.opts.onMessage(msg);
    };
    ws.onerror = () => ws.close();
    ws.onclose = () => {
      this.opts.onStatus("closed");
      if (!this.stopped) setTimeout(() => this.connect(), RETRY_MS);
    };
  }

  send(msg: ClientMessage): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(serializeClientMessage(msg));
    }
  }

  close(): void {
    this.stopped = true;
    this.ws?.close();
  }
}
