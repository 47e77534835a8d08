/** Debounced async runner with in-flight cancellation: a new call resets the
 * timer and aborts any request still running from an older call. */

export class DebouncedRequester {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;

  constructor(private delayMs = 300) {}

  run<T>(
    work: (signal: AbortSignal) => Promise<T>,
    onDone: (value: T) => void,
    onError?: (err: unknown) => void,
  ): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.controller?.abort();
      const controller = new AbortController();
      this.controller = controller;
      work(controller.signal).then(
        (value) => {
          if (!controller.signal.aborted) onDone(value);
        },
        (err) => {
          if (controller.signal.aborted) return;
          if (onError) onError(err);
        },
      );
    }, this.delayMs);
  }

  cancel(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    this.controller?.abort();
    this.controller = null;
  }
}
