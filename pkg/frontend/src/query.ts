// Query box grammar: whitespace/comma-separated key:value terms.
// `sort:key` terms are extracted as the sort expression and are never sent
// to the server as tag filters. Tokens without a colon are treated as
// still-being-typed and ignored.

export interface QueryExpression {
  terms: string[];
  sortKey: string | null;
}

export function parseQuery(text: string): QueryExpression {
  const terms: string[] = [];
  let sortKey: string | null = null;
  for (const token of text.split(/[\s,]+/)) {
    if (!token || !token.includes(':')) continue;
    if (token.startsWith('sort:')) {
      const key = token.slice('sort:'.length);
      if (key) sortKey = key; // last sort: wins
      continue;
    }
    terms.push(token);
  }
  return { terms, sortKey };
}
