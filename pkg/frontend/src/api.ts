/** Thin typed client over the single-session HTTP bridge. */

import type { InstanceDoc, MoveDir, StateDoc, TraceDoc } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = (await response.json()) as T & { error?: string };
    if (!response.ok) {
      throw new ApiError(response.status, body.error ?? `HTTP ${response.status}`);
    }
    return body;
  }

  getInstance(): Promise<InstanceDoc> {
    return this.request<InstanceDoc>("/api/instance");
  }

  getState(): Promise<StateDoc> {
    return this.request<StateDoc>("/api/state");
  }

  getTrace(): Promise<TraceDoc> {
    return this.request<TraceDoc>("/api/trace");
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload ?? {}),
    });
  }

  move(dir: MoveDir): Promise<StateDoc> {
    return this.post<StateDoc>("/api/move", { dir });
  }

  undo(): Promise<StateDoc> {
    return this.post<StateDoc>("/api/undo");
  }

  reset(): Promise<StateDoc> {
    return this.post<StateDoc>("/api/reset");
  }
}
