// Gallery model: the archived book, newest page first.
//
// The list loads once over HTTP and then grows in place as page_archived
// events arrive on the socket; no reload, no refetch of the whole list.

import type { PageArchivedMessage, PageInfo } from "./protocol.js";
import { pageImageUrl, pageVectorUrl } from "./protocol.js";

export interface PageCard {
  pageId: number;
  imageUrl: string;
  vectorUrl: string;
  hash: string;
  seed: number | null;
  contributors: string[];
  created: number | null;
  archived: number | null;
}

export interface GalleryModel {
  cards: PageCard[];
  error: string | null;
}

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export function emptyGallery(): GalleryModel {
  return { cards: [], error: null };
}

function cardFromInfo(info: PageInfo): PageCard {
  return {
    pageId: info.page_id,
    imageUrl: pageImageUrl(info.page_id),
    vectorUrl: pageVectorUrl(info.page_id),
    hash: info.hash,
    seed: info.seed,
    contributors: info.contributors,
    created: info.created,
    archived: info.archived,
  };
}

export async function loadGallery(fetchLike: FetchLike): Promise<GalleryModel> {
  let res;
  try {
    res = await fetchLike("/pages");
  } catch {
    return { cards: [], error: "book unreachable" };
  }
  if (!res.ok) {
    return { cards: [], error: `book returned ${res.status}` };
  }
  const records = (await res.json()) as PageInfo[];
  const cards = records.map(cardFromInfo);
  cards.sort((a, b) => b.pageId - a.pageId);
  return { cards, error: null };
}

/** Fold a live archive event into the model. Pure; returns a new model. */
export function applyArchived(
  model: GalleryModel,
  msg: PageArchivedMessage,
): GalleryModel {
  if (model.cards.some((c) => c.pageId === msg.page_id)) {
    return model;
  }
  const card: PageCard = {
    pageId: msg.page_id,
    imageUrl: msg.image,
    vectorUrl: msg.vector,
    hash: msg.hash,
    seed: null,
    contributors: [],
    created: null,
    archived: null,
  };
  const cards = [card, ...model.cards];
  cards.sort((a, b) => b.pageId - a.pageId);
  return { cards, error: null };
}
