/**
 * Keyboard input gate: at most one request in flight; while busy, the latest
 * queued direction replaces any earlier one (bursts coalesce to the most
 * recent key, matching what the player sees).
 */

export class InputQueue<T> {
  private pending: T | null = null;
  private busy = false;
  private waiters: (() => void)[] = [];

  constructor(private readonly send: (item: T) => Promise<void>) {}

  enqueue(item: T): void {
    if (this.busy) {
      this.pending = item;
      return;
    }
    void this.run(item);
  }

  private async run(item: T): Promise<void> {
    this.busy = true;
    try {
      await this.send(item);
    } catch {
      // the send callback owns error reporting; a failure must not stall input
    } finally {
      this.busy = false;
      const next = this.pending;
      this.pending = null;
      if (next !== null) {
        void this.run(next);
      } else {
        for (const resolve of this.waiters.splice(0)) resolve();
      }
    }
  }

  get inFlight(): boolean {
    return this.busy;
  }

  /** Resolves once the queue has fully drained. */
  idle(): Promise<void> {
    if (!this.busy && this.pending === null) return Promise.resolve();
    return new Promise((resolve) => this.waiters.push(resolve));
  }
}
