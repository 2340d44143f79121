/** Debounced, last-write-wins scheduling of preview requests.
 *
 * At most one request is ever in flight. While one is pending, newer
 * parameters replace each other silently; when the flight lands, the newest
 * parameters (if any) are sent next. A sequence guard drops any response
 * that has already been superseded, so the displayed result always matches
 * the most recent acknowledged parameters.
 */

export interface SchedulerCallbacks<P, R> {
  send: (params: P) => Promise<R>;
  onResult: (result: R, params: P) => void;
  onError: (error: unknown, params: P) => void;
}

export class PreviewScheduler<P, R> {
  private latest: P | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private seq = 0;
  private appliedSeq = 0;

  constructor(
    private callbacks: SchedulerCallbacks<P, R>,
    public debounceMs = 120,
  ) {}

  /** Register new parameters; the request fires after the debounce window. */
  request(params: P): void {
    this.latest = params;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.maybeIssue();
    }, this.debounceMs);
  }

  /** Skip the debounce window for whatever is pending. */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.maybeIssue();
  }

  get busy(): boolean {
    return this.inFlight || this.timer !== null || this.latest !== null;
  }

  private maybeIssue(): void {
    if (this.inFlight || this.latest === null) return;
    const params = this.latest;
    this.latest = null;
    this.inFlight = true;
    const mySeq = ++this.seq;
    this.callbacks.send(params).then(
      (result) => {
        if (mySeq > this.appliedSeq) {
          this.appliedSeq = mySeq;
          this.callbacks.onResult(result, params);
        }
      },
      (error) => {
        this.callbacks.onError(error, params);
      },
    ).then(() => {
      this.inFlight = false;
      // issue a queued update now unless its debounce window is still open
      if (this.timer === null && this.latest !== null) this.maybeIssue();
    });
  }
}
