// Presentation helpers. Values pass through from API payloads untouched;
// only their textual form is produced here. All calendar math is UTC, the
// same convention the service uses for day windows.

export const DAY_MS = 86_400_000;

export function utcDate(ms: number): string {
  return new Date(ms).toISOString().slice(0, 10);
}

/** "HH:MM" wall-clock time in UTC for a millisecond timestamp. */
export function utcTime(ms: number): string {
  return new Date(ms).toISOString().slice(11, 16);
}

export function dateToMs(date: string): number {
  return Date.parse(`${date}T00:00:00Z`);
}

export function shiftDate(date: string, days: number): string {
  return utcDate(dateToMs(date) + days * DAY_MS);
}

/** The n calendar days ending at (and including) `end`, oldest first. */
export function lastNDates(end: string, n: number): string[] {
  const out: string[] = [];
  for (let i = n - 1; i >= 0; i--) out.push(shiftDate(end, -i));
  return out;
}

export function isValidDate(date: string): boolean {
  if (!/^\d{4}-\d{2}-\d{2}$/.test(date)) return false;
  const ms = dateToMs(date);
  return !Number.isNaN(ms) && utcDate(ms) === date;
}

/** 0.70 -> "70%". Rounding is cosmetic; the payload score is the value. */
export function percent(fraction: number): string {
  return `${Math.round(fraction * 100)}%`;
}

/** Compact reading for a vital value: drop trailing ".0", keep one decimal. */
export function compactValue(v: number): string {
  const rounded = Math.round(v * 10) / 10;
  return Number.isInteger(rounded) ? String(rounded) : rounded.toFixed(1);
}

export const METRIC_LABELS: Record<string, string> = {
  heart_rate: "Heart rate",
  respiration: "Respiration",
  spo2: "SpO2",
  skin_temp: "Skin temp",
};

export const METRIC_UNITS: Record<string, string> = {
  heart_rate: "bpm",
  respiration: "breaths/min",
  spo2: "%",
  skin_temp: "°C",
};

export function metricLabel(metric: string): string {
  return METRIC_LABELS[metric] ?? metric;
}

export function metricUnit(metric: string): string {
  return METRIC_UNITS[metric] ?? "";
}

/** "chest_discomfort" -> "chest discomfort" */
export function humanizeToken(token: string): string {
  return token.replace(/_/g, " ");
}

const HTML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => HTML_ESCAPES[ch] ?? ch);
}
