// Gallery cards: everything the grid needs to render one artifact.

import type { ApiClient, ArtifactRow, TagRow } from './api.js';

export interface Miniature {
  kind: 'png' | 'txt';
  url: string;
}

export interface GalleryCard {
  hash: string;
  name: string;
  createdDate: string;
  tags: string[];
  hook: string;
  blobUrl: string;
  miniature: Miniature;
}

export function tagValue(card: GalleryCard, key: string): string | null {
  const prefix = `${key}:`;
  for (const tag of card.tags) {
    if (tag.startsWith(prefix)) return tag.slice(prefix.length);
  }
  return null;
}

export function buildCard(
  hash: string,
  artifactIndex: Map<string, ArtifactRow>,
  tagRows: TagRow[],
  client: ApiClient,
): GalleryCard {
  const row = artifactIndex.get(hash);
  const tags: string[] = [];
  for (const record of tagRows) {
    if (!tags.includes(record.tag)) tags.push(record.tag);
  }
  const kind = tags.includes('format:png') ? 'png' : 'txt';
  return {
    hash,
    name: row ? row.name : hash,
    createdDate: row ? row.createdDate : '',
    tags,
    hook: `arcvault read ${hash}`,
    blobUrl: client.blobUrl(hash),
    miniature: { kind, url: client.miniatureUrl(hash) },
  };
}

export function indexArtifacts(rows: ArtifactRow[]): Map<string, ArtifactRow> {
  const index = new Map<string, ArtifactRow>();
  for (const row of rows) {
    if (!index.has(row.md5hash)) index.set(row.md5hash, row); // first save wins
  }
  return index;
}
