/** Thin typed client for the session service.
 *
 * Choice posts are idempotent on the server (keyed by trial index), so a
 * network failure is retried with the identical body: a duplicate delivery
 * returns the original ack instead of double-recording.
 */

import type {
  ChoiceAck, Edge, SessionHead, SessionRequest, SessionStatus, TrialPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(`${status}: ${message}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (...args) => fetch(...args),
    private retries = 2,
    private retryDelayMs = 400,
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown,
                           retries = 0): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      if (retries > 0) {
        await delay(this.retryDelayMs);
        return this.request<T>(method, path, body, retries - 1);
      }
      throw err;
    }
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.text());
    }
    return (await resp.json()) as T;
  }

  createSession(req: SessionRequest): Promise<SessionHead> {
    return this.request<SessionHead>("POST", "/sessions", req);
  }

  status(sessionId: string): Promise<SessionStatus> {
    return this.request<SessionStatus>("GET", `/sessions/${sessionId}`);
  }

  getTrial(sessionId: string, n: number): Promise<TrialPayload> {
    return this.request<TrialPayload>("GET", `/sessions/${sessionId}/trials/${n}`);
  }

  /** Post the taught edge (and scaffold picks when the trial demanded
   * them); retried on transport failure, never on a server rejection. */
  postChoice(sessionId: string, n: number, edge: Edge,
             scaffold?: Edge[]): Promise<ChoiceAck> {
    const body = scaffold ? { edge, scaffold } : { edge };
    return this.request<ChoiceAck>(
      "POST", `/sessions/${sessionId}/trials/${n}/choice`, body, this.retries);
  }
}

function delay(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
