/**
 * Offline-tolerant submission queue.
 *
 * Scoring workshops happen in person, sometimes on flaky networks: a failed
 * submission stays queued and is retried in order on the next flush. Server
 * rejections (4xx) are not retried; they surface to the form instead.
 */

import { ApiError } from './apiClient';

export interface QueuedSubmission<T> {
  id: string;
  run: () => Promise<T>;
}

export interface FlushResult<T> {
  delivered: { id: string; result: T }[];
  rejected: { id: string; error: ApiError }[];
  /** submissions still queued because the network failed */
  remaining: number;
}

export class SubmissionQueue<T> {
  private items: QueuedSubmission<T>[] = [];

  get size(): number {
    return this.items.length;
  }

  enqueue(id: string, run: () => Promise<T>): void {
    this.items.push({ id, run });
  }

  /** Deliver queued submissions in order; stop at the first network failure. */
  async flush(): Promise<FlushResult<T>> {
    const delivered: { id: string; result: T }[] = [];
    const rejected: { id: string; error: ApiError }[] = [];
    while (this.items.length > 0) {
      const item = this.items[0];
      try {
        const result = await item.run();
        delivered.push({ id: item.id, result });
        this.items.shift();
      } catch (error) {
        if (error instanceof ApiError) {
          rejected.push({ id: item.id, error });
          this.items.shift();
          continue;
        }
        break; // network trouble: keep this and everything behind it
      }
    }
    return { delivered, rejected, remaining: this.items.length };
  }
}
