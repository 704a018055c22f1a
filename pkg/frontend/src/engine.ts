// Query execution: one /api/search round trip plus card hydration.
// The card set is exactly the search response; the client only reorders.

import type { ApiClient } from './api.js';
import { buildCard, GalleryCard, indexArtifacts } from './cards.js';
import type { QueryExpression } from './query.js';
import { sortCards } from './sort.js';

export async function runQuery(
  expr: QueryExpression,
  client: ApiClient,
): Promise<GalleryCard[]> {
  if (expr.terms.length === 0) return [];
  const hashes = await client.search(expr.terms, 'all');
  if (hashes.length === 0) return [];
  const artifactIndex = indexArtifacts(await client.artifacts());
  const cards = await Promise.all(
    hashes.map(async (hash) => buildCard(hash, artifactIndex, await client.tags(hash), client)),
  );
  return sortCards(cards, expr.sortKey);
}
