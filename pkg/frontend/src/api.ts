// Typed client for the read-only JSON API (v1). The UI consumes only these
// documented endpoints; there is no private channel to the server.

export interface ArtifactRow {
  md5hash: string;
  name: string;
  createdDate: string;
}

export interface TagRow {
  artifact: string;
  tag: string;
  createdDate: string;
}

export interface ApiClient {
  search(tags: string[], mode?: 'all' | 'any'): Promise<string[]>;
  artifacts(): Promise<ArtifactRow[]>;
  tags(hash: string): Promise<TagRow[]>;
  miniatureUrl(hash: string): string;
  blobUrl(hash: string): string;
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal });
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (body && body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new Error(`API request failed: ${detail}`);
  }
  return response.json() as Promise<T>;
}

export class HttpApiClient implements ApiClient {
  constructor(
    private readonly base: string = '',
    private readonly signal?: AbortSignal,
  ) {}

  search(tags: string[], mode: 'all' | 'any' = 'all'): Promise<string[]> {
    const params = new URLSearchParams();
    for (const tag of tags) params.append('tag', tag);
    params.set('mode', mode);
    return getJson(`${this.base}/api/search?${params}`, this.signal);
  }

  artifacts(): Promise<ArtifactRow[]> {
    return getJson(`${this.base}/api/artifacts`, this.signal);
  }

  tags(hash: string): Promise<TagRow[]> {
    return getJson(`${this.base}/api/tags/${hash}`, this.signal);
  }

  miniatureUrl(hash: string): string {
    return `${this.base}/api/miniature/${hash}`;
  }

  blobUrl(hash: string): string {
    return `${this.base}/api/blob/${hash}`;
  }
}
