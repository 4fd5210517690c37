// Runtime configuration. The host page may define window.__DASHBOARD_CONFIG__
// before the bundle loads; anything missing falls back to same-origin
// defaults. pollSeconds may later be overridden by the service's own
// /health.poll_seconds, which is the deployment's source of truth.

export interface DashboardConfig {
  /** Service origin, e.g. "http://localhost:8731". Empty string = same origin. */
  apiBaseUrl: string;
  /** Static bearer token if the service was started with one, else null. */
  authToken: string | null;
  /** Panel refresh cadence. The dashboard polls; nothing is pushed. */
  pollSeconds: number;
}

export const DEFAULT_CONFIG: DashboardConfig = {
  apiBaseUrl: "",
  authToken: null,
  pollSeconds: 30,
};

export function resolveConfig(overrides?: Partial<DashboardConfig> | null): DashboardConfig {
  return { ...DEFAULT_CONFIG, ...(overrides ?? {}) };
}
