// @vitest-environment jsdom
// DOM behavior: debounce, latest-wins rendering, error banner retention.

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { DEBOUNCE_MS, renderCards, startApp } from '../src/app.js';
import type { GalleryCard } from '../src/cards.js';
import { FakeApiClient, galleryFixture } from './fake-api.js';

const client = new FakeApiClient(galleryFixture());

function mount(): void {
  document.body.innerHTML = `
    <input id="query">
    <p id="status"></p>
    <p id="banner" hidden></p>
    <main id="grid"></main>
  `;
}

function fetchFromFake(input: RequestInfo | URL): Promise<Response> {
  const url = String(input);
  const respond = (body: unknown, status = 200) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });
  const parsed = new URL(url, 'http://ui.test');
  if (parsed.pathname === '/api/search') {
    const tags = parsed.searchParams.getAll('tag');
    const mode = (parsed.searchParams.get('mode') ?? 'all') as 'all' | 'any';
    return client.search(tags, mode).then((hashes) => respond(hashes));
  }
  if (parsed.pathname === '/api/artifacts') {
    return client.artifacts().then((rows) => respond(rows));
  }
  const tagsMatch = parsed.pathname.match(/^\/api\/tags\/([0-9a-f]{32})$/);
  if (tagsMatch) {
    return client
      .tags(tagsMatch[1] as string)
      .then((rows) => respond(rows))
      .catch(() => respond({ error: 'not found' }, 404));
  }
  if (parsed.pathname.startsWith('/api/miniature/')) {
    return Promise.resolve(new Response('mini', { status: 200 }));
  }
  return Promise.resolve(respond({ error: `no such route ${parsed.pathname}` }, 404));
}

describe('gallery app', () => {
  beforeEach(() => {
    mount();
    vi.useFakeTimers();
    vi.stubGlobal('fetch', vi.fn(fetchFromFake));
  });

  afterEach(() => {
    vi.unstubAllGlobals();
    vi.useRealTimers();
  });

  async function typeAndSettle(text: string): Promise<void> {
    const input = document.getElementById('query') as HTMLInputElement;
    input.value = text;
    input.dispatchEvent(new Event('input'));
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 10);
    await vi.runAllTimersAsync();
  }

  it('renders one card per search hit after the debounce', async () => {
    startApp(document);
    await typeAndSettle('class:gg');
    const hashes = [...document.querySelectorAll<HTMLElement>('.card')].map(
      (el) => el.dataset.hash,
    );
    expect(new Set(hashes)).toEqual(new Set(await client.search(['class:gg'])));
  });

  it('does not query before the debounce interval elapses', async () => {
    startApp(document);
    await vi.runAllTimersAsync(); // initial empty-state pass
    const fetchMock = fetch as ReturnType<typeof vi.fn>;
    fetchMock.mockClear();
    const input = document.getElementById('query') as HTMLInputElement;
    input.value = 'class:gg';
    input.dispatchEvent(new Event('input'));
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS - 50);
    expect(fetchMock).not.toHaveBeenCalled();
    await vi.advanceTimersByTimeAsync(60);
    await vi.runAllTimersAsync();
    expect(fetchMock).toHaveBeenCalled();
  });

  it('API failure shows the banner and keeps previous results', async () => {
    startApp(document);
    await typeAndSettle('class:gg');
    const before = document.querySelectorAll('.card').length;
    expect(before).toBeGreaterThan(0);

    const fetchMock = fetch as ReturnType<typeof vi.fn>;
    fetchMock.mockImplementation(() => Promise.reject(new Error('connection refused')));
    await typeAndSettle('class:lm');

    const banner = document.getElementById('banner') as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain('query failed');
    expect(document.querySelectorAll('.card').length).toBe(before);
  });

  it('empty input clears the grid into the prompt state', async () => {
    startApp(document);
    await typeAndSettle('class:gg');
    await typeAndSettle('');
    expect(document.querySelectorAll('.card').length).toBe(0);
    expect(document.getElementById('status')?.textContent).toContain('key:value');
  });

  it('renderCards produces copyable hook text per card', async () => {
    const cards: GalleryCard[] = [
      {
        hash: 'a'.repeat(32),
        name: 'pl',
        createdDate: '2016-02-09 10:00:00',
        tags: ['class:gg'],
        hook: `arcvault read ${'a'.repeat(32)}`,
        blobUrl: `/api/blob/${'a'.repeat(32)}`,
        miniature: { kind: 'txt', url: `/api/miniature/${'a'.repeat(32)}` },
      },
    ];
    renderCards(document.getElementById('grid') as HTMLElement, cards);
    const hook = document.querySelector('.hook') as HTMLElement;
    expect(hook.textContent).toBe(`arcvault read ${'a'.repeat(32)}`);
    expect(hook.textContent?.endsWith('a'.repeat(32))).toBe(true);
  });
});
