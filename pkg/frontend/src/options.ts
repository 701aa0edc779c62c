/** Options page: where the analysis service lives. */

import { defaultStorage } from './cache';
import { DEFAULT_BASE_URL } from './client';
import { OPTIONS_KEY } from './content';

async function init(): Promise<void> {
  const storage = defaultStorage();
  const input = document.getElementById('base-url') as HTMLInputElement;
  const status = document.getElementById('status') as HTMLElement;
  input.value = (await storage.get(OPTIONS_KEY)) ?? DEFAULT_BASE_URL;
  document.getElementById('save')?.addEventListener('click', async () => {
    const value = input.value.trim() || DEFAULT_BASE_URL;
    await storage.set(OPTIONS_KEY, value);
    status.textContent = `saved: ${value}`;
  });
}

void init();
