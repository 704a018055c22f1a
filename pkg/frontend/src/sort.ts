// Presentation sorting along a tag key. Values compare numerically when
// every present value parses as a number, lexicographically otherwise;
// cards missing the key sink to the end. `sort:createdDate` is
// chronological by save time.

import { GalleryCard, tagValue } from './cards.js';

function numericValue(text: string): number | null {
  if (text.trim() === '') return null;
  const value = Number(text);
  return Number.isNaN(value) ? null : value;
}

export function sortCards(cards: GalleryCard[], sortKey: string | null): GalleryCard[] {
  const sorted = [...cards];
  if (sortKey === null) {
    sorted.sort((a, b) => (a.hash < b.hash ? -1 : a.hash > b.hash ? 1 : 0));
    return sorted;
  }
  if (sortKey === 'createdDate') {
    sorted.sort(
      (a, b) =>
        a.createdDate.localeCompare(b.createdDate) || a.hash.localeCompare(b.hash),
    );
    return sorted;
  }
  const values = new Map<string, string | null>();
  for (const card of cards) values.set(card.hash, tagValue(card, sortKey));
  const present = [...values.values()].filter((v): v is string => v !== null);
  const numeric = present.length > 0 && present.every((v) => numericValue(v) !== null);
  sorted.sort((a, b) => {
    const left = values.get(a.hash) ?? null;
    const right = values.get(b.hash) ?? null;
    if (left === null && right === null) return a.hash.localeCompare(b.hash);
    if (left === null) return 1;
    if (right === null) return -1;
    const order = numeric
      ? (numericValue(left) as number) - (numericValue(right) as number)
      : left.localeCompare(right);
    return order || a.hash.localeCompare(b.hash);
  });
  return sorted;
}
