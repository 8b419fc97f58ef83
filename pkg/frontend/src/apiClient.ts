/**
 * Thin typed client for the review API.
 *
 * The fetch implementation is injected so tests can replay recorded
 * payloads; the browser entry point passes window.fetch. Expert identity
 * travels in the X-Expert-Id header, what-if scope in X-Session-Id.
 */

import {
  AssessmentPayload,
  ErrorPayload,
  FactorValues,
  GapsPayload,
  MatrixPayload,
  OverrideRequest,
  UcaListPayload,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly payload: ErrorPayload,
  ) {
    super(payload.errors.map((e) => `${e.field}: ${e.message}`).join('; ') || `HTTP ${status}`);
  }
}

export interface ClientOptions {
  baseUrl?: string;
  expertId?: string;
  sessionId?: string;
  fetchImpl?: FetchLike;
}

export class ReviewApiClient {
  private readonly baseUrl: string;
  private readonly expertId: string;
  private readonly sessionId: string;
  private readonly fetchImpl: FetchLike;

  constructor(options: ClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? '').replace(/\/$/, '');
    this.expertId = options.expertId ?? '';
    this.sessionId = options.sessionId ?? 'default';
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {
      'X-Session-Id': this.sessionId,
    };
    if (this.expertId) headers['X-Expert-Id'] = this.expertId;
    if (body !== undefined) headers['Content-Type'] = 'application/json';
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload as ErrorPayload);
    }
    return payload as T;
  }

  listUcas(pendingOnly = false): Promise<UcaListPayload> {
    const query = pendingOnly ? '?pending=true' : '';
    return this.request('GET', `/v1/ucas${query}`);
  }

  submitSheet(ucaId: string, factors: FactorValues, rationale?: string): Promise<unknown> {
    const body: Record<string, unknown> = { factors };
    if (rationale) body.rationale = rationale;
    return this.request('POST', `/v1/ucas/${encodeURIComponent(ucaId)}/sheet`, body);
  }

  getAssessment(ucaId: string): Promise<AssessmentPayload> {
    return this.request('GET', `/v1/ucas/${encodeURIComponent(ucaId)}/assessment`);
  }

  getMatrix(): Promise<MatrixPayload> {
    return this.request('GET', '/v1/matrix');
  }

  setOverrides(overrides: OverrideRequest): Promise<unknown> {
    return this.request('POST', '/v1/session/overrides', overrides);
  }

  resetOverrides(): Promise<unknown> {
    return this.request('DELETE', '/v1/session/overrides');
  }

  getGaps(): Promise<GapsPayload> {
    return this.request('GET', '/v1/gaps');
  }
}
