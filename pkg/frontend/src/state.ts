// Session state as a pure function of the event log.
//
// Everything the page shows comes out of reduce(): socket events and local
// pointer intents funnel through it, so a recorded log replays to the exact
// same state. The one ordering rule lives here too: a frame only replaces
// the rendered one when its seq is strictly newer.

import type { FrameMessage, ServerMessage } from "./protocol.js";

export type Connection = "connecting" | "open" | "closed";

export interface Notice {
  kind: "caption" | "archived" | "error";
  text: string;
}

export interface SessionState {
  connection: Connection;
  sessionId: number | null;
  capacity: number;
  gesture: "idle" | "active";
  frame: FrameMessage | null;
  frameSeq: number;
  captionPending: boolean;
  notices: Notice[];
  droppedFrames: number;
}

export type Action =
  | { kind: "connecting" }
  | { kind: "opened" }
  | { kind: "closed" }
  | { kind: "sent_gesture_start" }
  | { kind: "sent_gesture_end" }
  | { kind: "server"; msg: ServerMessage };

const MAX_NOTICES = 8;

export function initialState(): SessionState {
  return {
    connection: "connecting",
    sessionId: null,
    capacity: 0,
    gesture: "idle",
    frame: null,
    frameSeq: -1,
    captionPending: false,
    notices: [],
    droppedFrames: 0,
  };
}

function withNotice(state: SessionState, notice: Notice): SessionState {
  return { ...state, notices: [notice, ...state.notices].slice(0, MAX_NOTICES) };
}

export function reduce(state: SessionState, action: Action): SessionState {
  switch (action.kind) {
    case "connecting":
      return { ...state, connection: "connecting" };
    case "opened":
      return { ...state, connection: "open" };
    case "closed":
      // gestures cannot outlive the socket; the caption may still arrive
      // after resume, so the pending flag survives
      return { ...state, connection: "closed", gesture: "idle" };
    case "sent_gesture_start":
      return { ...state, gesture: "active" };
    case "sent_gesture_end":
      return { ...state, gesture: "idle", captionPending: true };
    case "server":
      return reduceServer(state, action.msg);
  }
}

function reduceServer(state: SessionState, msg: ServerMessage): SessionState {
  switch (msg.type) {
    case "hello":
      return {
        ...state,
        sessionId: msg.session,
        capacity: msg.capacity,
        connection: "open",
      };
    case "frame":
      if (msg.seq <= state.frameSeq) {
        // stale: a newer frame already rendered, drop this one unseen
        return { ...state, droppedFrames: state.droppedFrames + 1 };
      }
      return { ...state, frame: msg, frameSeq: msg.seq };
    case "gesture":
      return { ...state, gesture: msg.phase };
    case "caption_ready": {
      const mine = msg.session === state.sessionId;
      const next = mine ? { ...state, captionPending: false } : state;
      return withNotice(next, { kind: "caption", text: `${msg.zh} / ${msg.en}` });
    }
    case "placed":
      return state;
    case "page_archived":
      return withNotice(state, {
        kind: "archived",
        text: `leaf ${msg.page_id + 1} bound into the book`,
      });
    case "error":
      return withNotice(state, {
        kind: "error",
        text: msg.detail ? `${msg.code}: ${msg.detail}` : msg.code,
      });
    case "pong":
      return state;
  }
}
