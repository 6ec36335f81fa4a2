// Version-gated polling: keep asking /scene, hand the view to the controller
// only when scene_version moved (applyView drops stale answers anyway).

import { ApiClient } from './api.js';
import { ConsoleController } from './controller.js';

export interface Poller {
  stop(): void;
}

export function startScenePoll(
  api: ApiClient,
  controller: ConsoleController,
  intervalMs = 2000,
): Poller {
  let stopped = false;
  let timer: ReturnType<typeof setTimeout> | null = null;

  async function tick(): Promise<void> {
    if (stopped) return;
    try {
      const view = await api.getScene();
      controller.applyView(view);
    } catch {
      // transient failure: keep polling, the next tick may succeed
    } finally {
      if (!stopped) timer = setTimeout(tick, intervalMs);
    }
  }

  timer = setTimeout(tick, intervalMs);
  return {
    stop() {
      stopped = true;
      if (timer) clearTimeout(timer);
    },
  };
}
