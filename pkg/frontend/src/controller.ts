// Console state machine, DOM-free so it can be tested headlessly.
//
// Rules it enforces:
//  - at most one chat request in flight; send() refuses while busy
//  - the scene view only ever changes to what GET /scene returned, and only
//    when the version advanced (no optimistic updates)
//  - a network failure keeps the user's turn plus a retry affordance; the
//    agent turn arrives only once the server answered

import { ApiClient, SceneView } from './api.js';

export interface ChatTurn {
  author: 'user' | 'agent';
  text: string;
  timestamp: number;
  scene_version_after: number;
}

export type ControllerListener = () => void;

export class ConsoleController {
  turns: ChatTurn[] = [];
  view: SceneView | null = null;
  inFlight = false;
  pendingText: string | null = null; // set after a failed send, for retry

  private listeners: ControllerListener[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly now: () => number = () => Date.now(),
  ) {}

  onChange(listener: ControllerListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  private get version(): number {
    return this.view === null ? -1 : this.view.scene_version;
  }

  /** Load the initial scene (and whenever the poller sees a new version). */
  async refreshScene(): Promise<void> {
    const fresh = await this.api.getScene();
    this.applyView(fresh);
  }

  /** Adopt a server view; stale or already-seen versions are ignored. */
  applyView(view: SceneView): void {
    if (this.view !== null && view.scene_version <= this.view.scene_version) {
      return;
    }
    this.view = view;
    this.notify();
  }

  /**
   * Send one chat message.  Returns false when refused (busy or blank).
   * On network failure the turn stays pending and retry() can re-send.
   */
  async send(text: string): Promise<boolean> {
    const trimmed = text.trim();
    if (this.inFlight || trimmed === '') return false;
    this.turns.push({
      author: 'user',
      text: trimmed,
      timestamp: this.now(),
      scene_version_after: this.version,
    });
    this.notify();
    await this.dispatch(trimmed);
    return true;
  }

  /** Re-send the message whose reply never arrived. */
  async retry(): Promise<boolean> {
    if (this.inFlight || this.pendingText === null) return false;
    await this.dispatch(this.pendingText);
    return true;
  }

  private async dispatch(text: string): Promise<void> {
    this.inFlight = true;
    this.pendingText = null;
    this.notify();
    try {
      let reply;
      try {
        reply = await this.api.postChat(text);
      } catch {
        // undelivered: keep the retry affordance, never a silent drop
        this.pendingText = text;
        return;
      }
      this.turns.push({
        author: 'agent',
        text: reply.reply,
        timestamp: this.now(),
        scene_version_after: reply.scene_version,
      });
      if (reply.scene_version > this.version) {
        // the command was applied; a failed refresh must NOT re-arm retry
        // (re-sending would duplicate it) -- the poller catches up instead
        try {
          await this.refreshScene();
        } catch {
          /* next poll tick will fetch the new version */
        }
      }
    } finally {
      this.inFlight = false;
      this.notify();
    }
  }
}
