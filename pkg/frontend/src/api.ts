import { API_SCHEMA, AuditListEntry, MvrPayload, StatusResponse } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly detail?: unknown) {
    super(message);
  }
}

type FetchLike = typeof fetch;

/** Thin typed client; the UI owns no statistics, only these payloads. */
export class AuditApi {
  constructor(private baseUrl: string, private fetchImpl: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail: unknown;
      try {
        detail = (await response.json()).detail;
      } catch {
        detail = await response.text().catch(() => "");
      }
      const text = typeof detail === "string" ? detail : JSON.stringify(detail);
      throw new ApiError(`${response.status}: ${text}`, response.status, detail);
    }
    return (await response.json()) as T;
  }

  private checkSchema(payload: StatusResponse): StatusResponse {
    if (payload.schema_version !== API_SCHEMA) {
      throw new ApiError(
        `unsupported API schema ${payload.schema_version}, expected ${API_SCHEMA}`,
        0,
      );
    }
    return payload;
  }

  async listAudits(): Promise<AuditListEntry[]> {
    const payload = await this.request<{ audits: AuditListEntry[] }>("/audits");
    return payload.audits;
  }

  async getStatus(auditId: string): Promise<StatusResponse> {
    return this.checkSchema(
      await this.request<StatusResponse>(`/audits/${auditId}`),
    );
  }

  async submitMvr(auditId: string, payload: MvrPayload): Promise<StatusResponse> {
    return this.checkSchema(
      await this.request<StatusResponse>(`/audits/${auditId}/mvr`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      }),
    );
  }

  async drawMore(auditId: string, count: number | null): Promise<StatusResponse> {
    return this.checkSchema(
      await this.request<StatusResponse>(`/audits/${auditId}/draws`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ count }),
      }),
    );
  }

  async escalate(auditId: string): Promise<StatusResponse> {
    return this.checkSchema(
      await this.request<StatusResponse>(`/audits/${auditId}/escalate`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: "{}",
      }),
    );
  }

  async getTrees(auditId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/audits/${auditId}/trees`);
    if (!response.ok) {
      throw new ApiError(`${response.status}: trees unavailable`, response.status);
    }
    return response.text();
  }

  reportUrl(auditId: string): string {
    return `${this.baseUrl}/audits/${auditId}/report`;
  }
}
