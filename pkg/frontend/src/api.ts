// Typed client for the monitoring service. A thin wrapper over fetch so
// tests can substitute the transport wholesale; no payload field is
// renamed or reshaped on the way through.

import type { DashboardConfig } from "./config.js";
import type {
  AlertsPayload,
  ConversationsPayload,
  HealthPayload,
  NotePayload,
  PatientListPayload,
  PatientPayload,
  Resolution,
  RiskPayload,
  SummaryPayload,
  VitalsPayload,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

type QueryParams = Record<string, string | number | undefined>;

export class ApiClient {
  private readonly base: string;
  private readonly token: string | null;
  private readonly fetchImpl: FetchLike;

  constructor(config: DashboardConfig, fetchImpl?: FetchLike) {
    this.base = config.apiBaseUrl.replace(/\/+$/, "");
    this.token = config.authToken;
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  url(path: string, params?: QueryParams): string {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params ?? {})) {
      if (value !== undefined) query.set(key, String(value));
    }
    const qs = query.toString();
    return `${this.base}/api/v1${path}${qs ? `?${qs}` : ""}`;
  }

  private headers(withBody: boolean): Record<string, string> {
    const h: Record<string, string> = {};
    if (withBody) h["Content-Type"] = "application/json";
    if (this.token !== null) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(path: string, params?: QueryParams, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.url(path, params), {
        headers: this.headers(init?.body !== undefined),
        ...init,
      });
    } catch (err) {
      // no HTTP status to report: DNS failure, refused connection, CORS
      throw new ApiError(0, `service unreachable (${String(err)})`);
    }
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body, keep the status line
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthPayload> {
    return this.request("/health");
  }

  patients(): Promise<PatientListPayload> {
    return this.request("/patients");
  }

  patient(patientId: string): Promise<PatientPayload> {
    return this.request(`/patients/${encodeURIComponent(patientId)}`);
  }

  vitals(
    patientId: string,
    metric: string,
    tFrom: number,
    tTo: number,
    resolution: Resolution,
  ): Promise<VitalsPayload> {
    return this.request(`/patients/${encodeURIComponent(patientId)}/vitals`, {
      metric,
      from: tFrom,
      to: tTo,
      resolution,
    });
  }

  risk(patientId: string): Promise<RiskPayload> {
    return this.request(`/patients/${encodeURIComponent(patientId)}/risk`);
  }

  conversations(patientId: string, date?: string): Promise<ConversationsPayload> {
    return this.request(`/patients/${encodeURIComponent(patientId)}/conversations`, { date });
  }

  summary(patientId: string, date: string): Promise<SummaryPayload> {
    return this.request(`/patients/${encodeURIComponent(patientId)}/summary`, { date });
  }

  alerts(patientId: string, tFrom?: number, tTo?: number): Promise<AlertsPayload> {
    return this.request(`/patients/${encodeURIComponent(patientId)}/alerts`, {
      from: tFrom,
      to: tTo,
    });
  }

  postNote(patientId: string, author: string, text: string, t: number): Promise<NotePayload> {
    return this.request(`/patients/${encodeURIComponent(patientId)}/notes`, undefined, {
      method: "POST",
      body: JSON.stringify({ author, text, t }),
    });
  }
}
