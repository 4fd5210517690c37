// Panel C: wearable series. Default view is a daily-average bar per day
// over a two-week window; clicking a day swaps in that day's 24 hourly
// buckets, with a breadcrumb back to the trend.
//
// Bar heights are layout geometry only: each bar is scaled against the
// largest mean currently on screen so the chart fills its box. The means,
// ranges, and counts printed beside the bars are payload values verbatim.

import type { Metric, SeriesBucket, VitalsPayload } from "../types.js";
import {
  compactValue,
  dateToMs,
  escapeHtml,
  lastNDates,
  metricLabel,
  metricUnit,
} from "../format.js";
import { METRICS } from "../state.js";
import { emptyState } from "./shell.js";

const HOUR_MS = 3_600_000;
export const TREND_WINDOW_DAYS = 14;

export interface TrendDayVM {
  date: string;
  hasData: boolean;
  mean: number | null;
  label: string;
  heightPct: number;
  count: number;
}

export interface HourVM {
  hour: number;
  label: string;
  hasData: boolean;
  mean: number | null;
  valueText: string;
  rangeText: string;
  heightPct: number;
  isPeak: boolean;
}

export interface TrendVM {
  kind: "trend";
  metric: Metric;
  unit: string;
  windowLabel: string;
  days: TrendDayVM[];
  hasAnyData: boolean;
}

export interface HourlyVM {
  kind: "hourly";
  metric: Metric;
  unit: string;
  day: string;
  hours: HourVM[];
  hasAnyData: boolean;
  /** The strictly-largest hourly mean, when unique. Marked in the chart. */
  peakHour: number | null;
}

export type VitalsVM = TrendVM | HourlyVM;

function bucketsByStart(payload: VitalsPayload): Map<number, SeriesBucket> {
  const map = new Map<number, SeriesBucket>();
  for (const bucket of payload.buckets ?? []) map.set(bucket.bucket_start, bucket);
  return map;
}

function scaleHeights(means: (number | null)[]): number[] {
  const present = means.filter((m): m is number => m !== null);
  const top = present.length ? Math.max(...present) : 0;
  return means.map((m) => {
    if (m === null || top <= 0) return 0;
    return Math.max(2, Math.round((m / top) * 100));
  });
}

export function trendViewModel(
  payload: VitalsPayload,
  endDate: string,
  metric: Metric,
): TrendVM {
  const byStart = bucketsByStart(payload);
  const dates = lastNDates(endDate, TREND_WINDOW_DAYS);
  const means = dates.map((d) => byStart.get(dateToMs(d))?.mean ?? null);
  const heights = scaleHeights(means);
  const days = dates.map((date, i) => {
    const bucket = byStart.get(dateToMs(date));
    return {
      date,
      hasData: bucket !== undefined,
      mean: bucket ? bucket.mean : null,
      label: bucket ? compactValue(bucket.mean) : "",
      heightPct: heights[i] ?? 0,
      count: bucket ? bucket.count : 0,
    };
  });
  return {
    kind: "trend",
    metric,
    unit: metricUnit(metric),
    windowLabel: `${dates[0]} to ${endDate}`,
    days,
    hasAnyData: days.some((d) => d.hasData),
  };
}

export function hourlyViewModel(
  payload: VitalsPayload,
  day: string,
  metric: Metric,
): HourlyVM {
  const byStart = bucketsByStart(payload);
  const dayStart = dateToMs(day);
  const means: (number | null)[] = [];
  const buckets: (SeriesBucket | undefined)[] = [];
  for (let hour = 0; hour < 24; hour++) {
    const bucket = byStart.get(dayStart + hour * HOUR_MS);
    buckets.push(bucket);
    means.push(bucket ? bucket.mean : null);
  }
  const heights = scaleHeights(means);

  // Peak marker: the single tallest bar, only when it is strictly tallest.
  // Comparing displayed values for emphasis is presentation, not analysis;
  // a flat day gets no marker.
  const present = means.filter((m): m is number => m !== null);
  const top = present.length ? Math.max(...present) : null;
  const peakHour =
    top !== null && means.filter((m) => m === top).length === 1
      ? means.indexOf(top)
      : null;

  const hours = buckets.map((bucket, hour) => ({
    hour,
    label: `${String(hour).padStart(2, "0")}:00`,
    hasData: bucket !== undefined,
    mean: bucket ? bucket.mean : null,
    valueText: bucket ? compactValue(bucket.mean) : "",
    rangeText: bucket ? `${compactValue(bucket.min)}–${compactValue(bucket.max)}` : "",
    heightPct: heights[hour] ?? 0,
    isPeak: hour === peakHour,
  }));
  return {
    kind: "hourly",
    metric,
    unit: metricUnit(metric),
    day,
    hours,
    hasAnyData: hours.some((h) => h.hasData),
    peakHour,
  };
}

function renderMetricToggle(active: Metric): string {
  const buttons = METRICS.map((m) => {
    const cls = m === active ? "toggle__btn toggle__btn--active" : "toggle__btn";
    return (
      `<button type="button" class="${cls}" data-action="set-metric" ` +
      `data-metric="${m}">${escapeHtml(metricLabel(m))}</button>`
    );
  });
  return `<div class="toggle" role="group" aria-label="Metric">${buttons.join("")}</div>`;
}

function renderTrendBars(vm: TrendVM): string {
  const bars = vm.days.map((day) => {
    if (!day.hasData) {
      return (
        `<div class="bar-slot bar-slot--empty" title="${day.date}: no data">` +
        `<span class="bar-slot__date">${day.date.slice(5)}</span></div>`
      );
    }
    const title = `${day.date}: mean ${day.label} ${vm.unit} (${day.count} samples)`;
    return [
      `<div class="bar-slot" title="${escapeHtml(title)}">`,
      `<button type="button" class="bar" style="height:${day.heightPct}%" `,
      `data-action="drill" data-day="${day.date}" aria-label="${escapeHtml(title)}"></button>`,
      `<span class="bar-slot__date">${day.date.slice(5)}</span>`,
      `</div>`,
    ].join("");
  });
  return `<div class="bars bars--trend">${bars.join("")}</div>`;
}

function renderHourBars(vm: HourlyVM): string {
  const bars = vm.hours.map((h) => {
    const flagged = h.isPeak ? " bar--peak" : "";
    const title = h.hasData
      ? `${h.label}: mean ${h.valueText} ${vm.unit}, range ${h.rangeText}`
      : `${h.label}: no data`;
    const bar = h.hasData
      ? `<div class="bar bar--hour${flagged}" style="height:${h.heightPct}%"></div>`
      : "";
    const tick = h.hour % 6 === 0 ? `<span class="bar-slot__date">${h.label}</span>` : "";
    return `<div class="bar-slot${h.hasData ? "" : " bar-slot--empty"}" title="${escapeHtml(title)}">${bar}${tick}</div>`;
  });
  return `<div class="bars bars--hourly">${bars.join("")}</div>`;
}

export function renderVitals(vm: VitalsVM): string {
  const toggle = renderMetricToggle(vm.metric);
  if (vm.kind === "trend") {
    if (!vm.hasAnyData) {
      return toggle + emptyState("No wearable data in this window.");
    }
    const caption =
      `<p class="chart-caption">Daily mean ${escapeHtml(metricLabel(vm.metric))}` +
      ` (${escapeHtml(vm.unit)}), ${escapeHtml(vm.windowLabel)}. Click a day for hourly detail.</p>`;
    return toggle + renderTrendBars(vm) + caption;
  }

  const crumb =
    `<nav class="breadcrumb"><button type="button" data-action="trend-back">` +
    `← 14-day trend</button><span>${escapeHtml(vm.day)}, hourly</span></nav>`;
  if (!vm.hasAnyData) {
    return toggle + crumb + emptyState(`No wearable data on ${vm.day}.`);
  }
  const peak = vm.peakHour !== null ? vm.hours[vm.peakHour] : undefined;
  const peakNote = peak
    ? `<p class="chart-caption chart-caption--peak">Peak at ${peak.label}: ` +
      `mean ${escapeHtml(peak.valueText)} ${escapeHtml(vm.unit)} (range ${escapeHtml(peak.rangeText)}).</p>`
    : "";
  return toggle + crumb + renderHourBars(vm) + peakNote;
}
