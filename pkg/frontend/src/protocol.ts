// Wire types for the session websocket and the pages HTTP endpoints.
// This file mirrors the server's schemas exactly; nothing extra rides along.

export type ClientMessage =
  | { type: "ping" }
  | { type: "gesture_start" }
  | { type: "gesture_end" }
  | { type: "sample"; x: number; y: number }
  | { type: "pose"; left: [number, number]; right: [number, number] };

export interface HelloMessage {
  type: "hello";
  seq: number;
  session: number;
  room: string;
  role: string;
  capacity: number;
  page_id: number;
  tick_hz: number;
}

export interface FrameMessage {
  type: "frame";
  seq: number;
  t: number;
  mass: number;
  page: { page_id: number; filled: number; capacity: number };
  ink: string; // base64 PNG
  strokes: [number, number, string][];
}

export interface GestureMessage {
  type: "gesture";
  seq: number;
  phase: "active" | "idle";
}

export interface CaptionReadyMessage {
  type: "caption_ready";
  seq: number;
  session: number;
  en: string;
  zh: string;
  provider: string;
}

export interface PlacedMessage {
  type: "placed";
  seq: number;
  session: number;
  page_id: number;
  slot_lo: number;
  slot_hi: number;
}

export interface PageArchivedMessage {
  type: "page_archived";
  seq: number;
  page_id: number;
  hash: string;
  image: string;
  vector: string;
}

export interface ErrorMessage {
  type: "error";
  seq: number;
  code: string;
  detail?: string;
}

export interface PongMessage {
  type: "pong";
  seq: number;
}

export type ServerMessage =
  | HelloMessage
  | FrameMessage
  | GestureMessage
  | CaptionReadyMessage
  | PlacedMessage
  | PageArchivedMessage
  | ErrorMessage
  | PongMessage;

const SERVER_TYPES = new Set([
  "hello", "frame", "gesture", "caption_ready",
  "placed", "page_archived", "error", "pong",
]);

/** Parse one websocket payload; null for anything that is not a known message. */
export function parseServerMessage(text: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  if (typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) return null;
  if (typeof msg.seq !== "number") return null;
  return msg as unknown as ServerMessage;
}

export function serializeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

/** One archived page as served by GET /pages. */
export interface PageInfo {
  page_id: number;
  seed: number;
  created: number;
  archived: number;
  contributors: string[];
  image_file: string;
  vector_file: string;
  hash: string;
}

export function pageImageUrl(pageId: number): string {
  return `/pages/${pageId}/image`;
}

export function pageVectorUrl(pageId: number): string {
  return `/pages/${pageId}/vector`;
}
