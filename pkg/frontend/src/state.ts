// URL-backed view state. The location hash carries everything needed to
// restore the exact view, so a pasted link lands a colleague on the same
// patient, day, metric, and drill-down:
//
//   #/pt-emily/2024-05-01?metric=spo2&drill=2024-04-28
//
// Unknown or malformed pieces fall back to the provided defaults rather
// than erroring; a stale link should still open something sensible.

import type { Metric } from "./types.js";
import { isValidDate } from "./format.js";

export const METRICS: readonly Metric[] = [
  "heart_rate",
  "respiration",
  "spo2",
  "skin_temp",
];

export interface ViewState {
  patientId: string | null;
  /** Day shown in the summary and conversation panels. */
  date: string;
  metric: Metric;
  /** When set, the vitals panel shows hourly buckets for this day. */
  drillDay: string | null;
}

export function defaultState(today: string): ViewState {
  return { patientId: null, date: today, metric: "heart_rate", drillDay: null };
}

function asMetric(value: string | null, fallback: Metric): Metric {
  return value !== null && (METRICS as readonly string[]).includes(value)
    ? (value as Metric)
    : fallback;
}

export function parseHash(hash: string, fallback: ViewState): ViewState {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  const qIndex = raw.indexOf("?");
  const path = qIndex === -1 ? raw : raw.slice(0, qIndex);
  const query = new URLSearchParams(qIndex === -1 ? "" : raw.slice(qIndex + 1));

  const segments = path.split("/").filter((s) => s.length > 0);
  const patientId = segments[0] ?? null;
  const dateSegment = segments[1];
  const drill = query.get("drill");

  return {
    patientId: patientId || fallback.patientId,
    date: dateSegment && isValidDate(dateSegment) ? dateSegment : fallback.date,
    metric: asMetric(query.get("metric"), fallback.metric),
    drillDay: drill && isValidDate(drill) ? drill : null,
  };
}

export function formatHash(state: ViewState): string {
  const path = `#/${state.patientId ?? ""}/${state.date}`;
  const query = new URLSearchParams();
  query.set("metric", state.metric);
  if (state.drillDay) query.set("drill", state.drillDay);
  return `${path}?${query.toString()}`;
}
