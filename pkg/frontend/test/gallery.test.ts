// Gallery model: newest-first listing that grows live, never refetching.

import { describe, expect, it } from "vitest";
import { applyArchived, emptyGallery, loadGallery, type FetchLike } from "../src/gallery.js";
import type { PageArchivedMessage, PageInfo } from "../src/protocol.js";

function record(pageId: number): PageInfo {
  return {
    page_id: pageId,
    seed: 1000 + pageId,
    created: pageId * 10,
    archived: pageId * 10 + 5,
    contributors: ["wu", "ana"],
    image_file: `pages/page-${String(pageId).padStart(5, "0")}.png`,
    vector_file: `pages/page-${String(pageId).padStart(5, "0")}.svg`,
    hash: `h${pageId}`,
  };
}

function stubFetch(records: PageInfo[]): { fetch: FetchLike; calls: string[] } {
  const calls: string[] = [];
  return {
    calls,
    fetch: async (url) => {
      calls.push(url);
      return { ok: true, status: 200, json: async () => records };
    },
  };
}

function archivedEvent(pageId: number): PageArchivedMessage {
  return {
    type: "page_archived",
    seq: 100 + pageId,
    page_id: pageId,
    hash: `h${pageId}`,
    image: `/pages/${pageId}/image`,
    vector: `/pages/${pageId}/vector`,
  };
}

describe("loading", () => {
  it("lists pages newest first", async () => {
    const { fetch } = stubFetch([record(0), record(1), record(2)]);
    const model = await loadGallery(fetch);
    expect(model.error).toBeNull();
    expect(model.cards.map((c) => c.pageId)).toEqual([2, 1, 0]);
    expect(model.cards[0].imageUrl).toBe("/pages/2/image");
    expect(model.cards[0].contributors).toEqual(["wu", "ana"]);
  });

  it("empty book loads cleanly", async () => {
    const { fetch } = stubFetch([]);
    const model = await loadGallery(fetch);
    expect(model.cards).toEqual([]);
    expect(model.error).toBeNull();
  });

  it("http failure becomes an inline error", async () => {
    const fetch: FetchLike = async () => ({
      ok: false, status: 503, json: async () => ({}),
    });
    const model = await loadGallery(fetch);
    expect(model.error).toBe("book returned 503");
  });

  it("network failure becomes an inline error", async () => {
    const fetch: FetchLike = async () => {
      throw new Error("refused");
    };
    const model = await loadGallery(fetch);
    expect(model.error).toBe("book unreachable");
  });
});

describe("live growth", () => {
  it("an injected archive event grows the list without a reload", async () => {
    const { fetch, calls } = stubFetch([record(0), record(1), record(2)]);
    let model = await loadGallery(fetch);
    expect(calls).toHaveLength(1);

    model = applyArchived(model, archivedEvent(3));
    expect(model.cards.map((c) => c.pageId)).toEqual([3, 2, 1, 0]);
    expect(model.cards[0].imageUrl).toBe("/pages/3/image");
    expect(model.cards[0].hash).toBe("h3");
    expect(calls).toHaveLength(1); // still just the initial load
  });

  it("duplicate events are ignored", () => {
    let model = applyArchived(emptyGallery(), archivedEvent(0));
    const again = applyArchived(model, archivedEvent(0));
    expect(again).toBe(model);
  });

  it("events arriving out of order keep the list sorted", () => {
    let model = applyArchived(emptyGallery(), archivedEvent(2));
    model = applyArchived(model, archivedEvent(0));
    model = applyArchived(model, archivedEvent(1));
    expect(model.cards.map((c) => c.pageId)).toEqual([2, 1, 0]);
  });

  it("an archive event clears a stale load error", async () => {
    const fetch: FetchLike = async () => ({ ok: false, status: 500, json: async () => ({}) });
    let model = await loadGallery(fetch);
    expect(model.error).not.toBeNull();
    model = applyArchived(model, archivedEvent(0));
    expect(model.error).toBeNull();
    expect(model.cards.map((c) => c.pageId)).toEqual([0]);
  });
});
