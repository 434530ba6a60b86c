// Page wiring: one canvas to write on, one column of notices, one gallery.

import { applyArchived, emptyGallery, loadGallery, type GalleryModel } from "./gallery.js";
import type { ServerMessage } from "./protocol.js";
import { SessionSocket } from "./socket.js";
import { initialState, reduce, type SessionState } from "./state.js";
import { PointerWriter } from "./writer.js";

const canvas = document.getElementById("ink") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const noticesEl = document.getElementById("notices")!;
const galleryEl = document.getElementById("gallery")!;
const fillEl = document.getElementById("fill")!;

let state: SessionState = initialState();
let gallery: GalleryModel = emptyGallery();
let inkImage: HTMLImageElement | null = null;

function dispatch(action: Parameters<typeof reduce>[1]): void {
  const before = state;
  state = reduce(state, action);
  if (state !== before) render();
}

function onServerMessage(msg: ServerMessage): void {
  if (msg.type === "frame" && msg.seq > state.frameSeq) {
    const img = new Image();
    img.onload = () => {
      inkImage = img;
      drawCanvas();
    };
    img.src = `data:image/png;base64,${msg.ink}`;
  }
  if (msg.type === "page_archived") {
    gallery = applyArchived(gallery, msg);
    renderGallery();
  }
  dispatch({ kind: "server", msg });
}

const socket = new SessionSocket({
  name: new URLSearchParams(location.search).get("name") ?? "anonymous",
  onMessage: onServerMessage,
  onStatus: (s) => dispatch({ kind: s === "open" ? "opened" : s === "closed" ? "closed" : "connecting" }),
});

const writer = new PointerWriter(socket);

canvas.addEventListener("pointerdown", (ev) => {
  canvas.setPointerCapture(ev.pointerId);
  writer.down();
  dispatch({ kind: "sent_gesture_start" });
  writer.move(ev.clientX, ev.clientY, canvas.getBoundingClientRect());
});
canvas.addEventListener("pointermove", (ev) => {
  writer.move(ev.clientX, ev.clientY, canvas.getBoundingClientRect());
});
const endGesture = () => {
  if (!writer.isActive) return;
  writer.up();
  dispatch({ kind: "sent_gesture_end" });
};
canvas.addEventListener("pointerup", endGesture);
canvas.addEventListener("pointercancel", endGesture);

function drawCanvas(): void {
  ctx.fillStyle = "#f5f0e6";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (inkImage) {
    ctx.imageSmoothingEnabled = true;
    ctx.drawImage(inkImage, 0, 0, canvas.width, canvas.height);
  }
  const frame = state.frame;
  if (frame) {
    for (const [x, y, color] of frame.strokes) {
      ctx.fillStyle = color === "black" ? "#1a1a1a" : "#ffffff";
      ctx.beginPath();
      ctx.arc(x * canvas.width, y * canvas.height, 2, 0, Math.PI * 2);
      ctx.fill();
    }
  }
}

function render(): void {
  statusEl.textContent =
    state.connection === "open"
      ? state.gesture === "active"
        ? "writing"
        : state.captionPending
          ? "awaiting caption"
          : "ready (press and drag to write; the installation used both wrists)"
      : state.connection;
  if (state.frame) {
    const p = state.frame.page;
    fillEl.textContent = `page ${p.page_id + 1}: ${p.filled}/${p.capacity} marks`;
  }
  noticesEl.replaceChildren(
    ...state.notices.map((n) => {
      const li = document.createElement("li");
      li.className = `notice ${n.kind}`;
      li.textContent = n.text;
      return li;
    }),
  );
  drawCanvas();
}

function renderGallery(): void {
  if (gallery.error) {
    galleryEl.replaceChildren(errorCard(gallery.error));
    return;
  }
  if (gallery.cards.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "The book is empty. Write the first page.";
    galleryEl.replaceChildren(empty);
    return;
  }
  galleryEl.replaceChildren(
    ...gallery.cards.map((card) => {
      const fig = document.createElement("figure");
      fig.className = "page-card";
      const img = document.createElement("img");
      img.src = card.imageUrl;
      img.alt = `page ${card.pageId + 1}`;
      img.onerror = () => fig.replaceChildren(errorCard(`page ${card.pageId + 1} missing`));
      const cap = document.createElement("figcaption");
      const who = card.contributors.length ? ` by ${card.contributors.join(", ")}` : "";
      cap.textContent = `leaf ${card.pageId + 1}${who}`;
      fig.append(img, cap);
      return fig;
    }),
  );
}

function errorCard(text: string): HTMLElement {
  const div = document.createElement("div");
  div.className = "error-card";
  div.textContent = text;
  return div;
}

socket.connect();
render();
loadGallery((url) => fetch(url)).then((model) => {
  gallery = model;
  renderGallery();
});
