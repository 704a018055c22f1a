// DOM wiring for the gallery: debounced query box, latest-wins fetches,
// an error banner that keeps the previous results on screen.

import { HttpApiClient } from './api.js';
import type { GalleryCard } from './cards.js';
import { runQuery } from './engine.js';
import { parseQuery } from './query.js';

export const DEBOUNCE_MS = 250;

interface AppElements {
  input: HTMLInputElement;
  status: HTMLElement;
  banner: HTMLElement;
  grid: HTMLElement;
}

function renderMiniature(card: GalleryCard): HTMLElement {
  if (card.miniature.kind === 'png') {
    const img = document.createElement('img');
    img.className = 'miniature';
    img.src = card.miniature.url;
    img.alt = `miniature of ${card.hash}`;
    return img;
  }
  const pre = document.createElement('pre');
  pre.className = 'miniature';
  pre.textContent = '';
  fetch(card.miniature.url)
    .then((response) => (response.ok ? response.text() : ''))
    .then((text) => {
      pre.textContent = text;
    })
    .catch(() => {
      pre.textContent = '';
    });
  return pre;
}

export async function copyHook(card: GalleryCard, hookElement: HTMLElement): Promise<void> {
  try {
    await navigator.clipboard.writeText(card.hook);
    hookElement.classList.add('copied');
    setTimeout(() => hookElement.classList.remove('copied'), 800);
  } catch {
    // clipboard denied: leave the hook text selected instead
    const selection = window.getSelection();
    if (selection) {
      const range = document.createRange();
      range.selectNodeContents(hookElement);
      selection.removeAllRanges();
      selection.addRange(range);
    }
  }
}

function renderCard(card: GalleryCard): HTMLElement {
  const section = document.createElement('section');
  section.className = 'card';
  section.dataset.hash = card.hash;

  const title = document.createElement('h2');
  const link = document.createElement('a');
  link.href = card.blobUrl;
  link.textContent = card.name;
  title.appendChild(link);
  const hashSpan = document.createElement('span');
  hashSpan.className = 'hash';
  hashSpan.textContent = card.hash;
  title.appendChild(hashSpan);
  section.appendChild(title);

  section.appendChild(renderMiniature(card));

  const hook = document.createElement('code');
  hook.className = 'hook';
  hook.textContent = card.hook;
  hook.title = 'click to copy';
  hook.addEventListener('click', () => void copyHook(card, hook));
  section.appendChild(hook);

  const chips = document.createElement('ul');
  chips.className = 'chips';
  for (const tag of card.tags) {
    const chip = document.createElement('li');
    chip.textContent = tag;
    chips.appendChild(chip);
  }
  section.appendChild(chips);
  return section;
}

export function renderCards(grid: HTMLElement, cards: GalleryCard[]): void {
  grid.replaceChildren(...cards.map(renderCard));
}

export function startApp(root: Document = document): void {
  const elements: AppElements = {
    input: root.getElementById('query') as HTMLInputElement,
    status: root.getElementById('status') as HTMLElement,
    banner: root.getElementById('banner') as HTMLElement,
    grid: root.getElementById('grid') as HTMLElement,
  };
  const client = new HttpApiClient('');
  let debounceTimer: ReturnType<typeof setTimeout> | null = null;
  let generation = 0;

  const execute = async () => {
    const expr = parseQuery(elements.input.value);
    const ticket = ++generation;
    if (expr.terms.length === 0) {
      elements.grid.replaceChildren();
      elements.status.textContent = 'Type key:value filters, e.g. class:gg sort:createdDate';
      elements.banner.hidden = true;
      return;
    }
    try {
      const cards = await runQuery(expr, client);
      if (ticket !== generation) return; // a newer query finished first
      elements.banner.hidden = true;
      elements.status.textContent = `${cards.length} artifact${cards.length === 1 ? '' : 's'}`;
      renderCards(elements.grid, cards);
    } catch (error) {
      if (ticket !== generation) return;
      elements.banner.textContent = `query failed: ${(error as Error).message}`;
      elements.banner.hidden = false; // previous results stay on screen
    }
  };

  elements.input.addEventListener('input', () => {
    if (debounceTimer !== null) clearTimeout(debounceTimer);
    debounceTimer = setTimeout(() => void execute(), DEBOUNCE_MS);
  });
  void execute();
}

if (typeof document !== 'undefined' && document.getElementById('grid')) {
  startApp(document);
}
