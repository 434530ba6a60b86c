// Pointer-to-protocol translation for the writing canvas.
//
// Pointer-down opens a gesture, pointer-moves stream normalized samples
// while it stays open, pointer-up closes it. Nothing is sent while idle,
// and the sample log is strictly ordered in time: a move landing on the
// same clock tick as the previous one is dropped rather than reordered.

import type { ClientMessage } from "./protocol.js";

export interface CanvasRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface Sink {
  send(msg: ClientMessage): void;
}

export interface LoggedMessage {
  t: number;
  msg: ClientMessage;
}

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

/** Map viewport pixels to the unit square the server expects. */
export function normalizePoint(
  px: number,
  py: number,
  rect: CanvasRect,
): { x: number; y: number } {
  const w = rect.width || 1;
  const h = rect.height || 1;
  return {
    x: clamp01((px - rect.left) / w),
    y: clamp01((py - rect.top) / h),
  };
}

export class PointerWriter {
  private active = false;
  private lastSampleT = -Infinity;
  readonly log: LoggedMessage[] = [];

  constructor(
    private readonly sink: Sink,
    private readonly clock: () => number = () => performance.now(),
  ) {}

  get isActive(): boolean {
    return this.active;
  }

  private emit(msg: ClientMessage, t: number = this.clock()): void {
    this.log.push({ t, msg });
    this.sink.send(msg);
  }

  down(): void {
    if (this.active) return;
    this.active = true;
    this.emit({ type: "gesture_start" });
  }

  move(px: number, py: number, rect: CanvasRect): void {
    if (!this.active) return;
    const t = this.clock();
    if (t <= this.lastSampleT) return;
    this.lastSampleT = t;
    const { x, y } = normalizePoint(px, py, rect);
    this.emit({ type: "sample", x, y }, t);
  }

  up(): void {
    if (!this.active) return;
    this.active = false;
    this.emit({ type: "gesture_end" });
  }

  /** Close out a gesture without coordinates, e.g. pointercancel. */
  cancel(): void {
    this.up();
  }
}
