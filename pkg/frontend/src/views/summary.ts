// Panel B: the service's written daily summary, shown as rendered text,
// plus per-metric stat chips and the clinician notes attached to the day.
// The note form posts back to the service; the note then returns through
// the summary payload on the next fetch, which is the round trip the
// "notes reappear after refresh" behavior relies on.

import type { SummaryPayload } from "../types.js";
import {
  compactValue,
  escapeHtml,
  metricLabel,
  metricUnit,
} from "../format.js";
import { badge, emptyState } from "./shell.js";

export interface MetricChipVM {
  metric: string;
  label: string;
  mean: string;
  unit: string;
  range: string;
  count: number;
  flagged: boolean;
}

export interface SummaryVM {
  date: string;
  hasData: boolean;
  alertCount: number;
  lines: string[];
  chips: MetricChipVM[];
  noteHooks: string[];
}

export function summaryViewModel(payload: SummaryPayload): SummaryVM {
  const chips = Object.entries(payload.metrics).map(([metric, stats]) => ({
    metric,
    label: metricLabel(metric),
    mean: compactValue(stats.mean),
    unit: metricUnit(metric),
    range: `${compactValue(stats.min)}–${compactValue(stats.max)}`,
    count: stats.count,
    flagged: stats.deviation_flag,
  }));
  const hasData =
    chips.length > 0 || payload.symptoms.length > 0 || payload.alert_count > 0;
  return {
    date: payload.date,
    hasData,
    alertCount: payload.alert_count,
    lines: payload.rendered_text.split("\n"),
    chips,
    noteHooks: payload.note_hooks,
  };
}

export function summaryBadge(vm: SummaryVM): string {
  if (vm.alertCount === 0) return "";
  const label = vm.alertCount === 1 ? "1 alert" : `${vm.alertCount} alerts`;
  return badge(label, "red");
}

function renderChip(chip: MetricChipVM): string {
  const flag = chip.flagged ? ` ${badge("deviation", "yellow")}` : "";
  return [
    `<div class="stat-chip${chip.flagged ? " stat-chip--flagged" : ""}">`,
    `<span class="stat-chip__label">${escapeHtml(chip.label)}</span>`,
    `<span class="stat-chip__mean">${escapeHtml(chip.mean)}<small> ${escapeHtml(chip.unit)}</small></span>`,
    `<span class="stat-chip__range">${escapeHtml(chip.range)} · n=${chip.count}</span>${flag}`,
    `</div>`,
  ].join("");
}

export function renderNoteForm(): string {
  return [
    `<form class="note-form" data-form="note">`,
    `<input type="text" name="note-text" data-field="note-text" `,
    `placeholder="Add a note for this day" aria-label="New note" maxlength="2000">`,
    `<button type="submit" data-action="submit-note">Save note</button>`,
    `</form>`,
  ].join("");
}

export function renderSummary(vm: SummaryVM): string {
  if (!vm.hasData && vm.noteHooks.length === 0) {
    return emptyState(`No data recorded for ${vm.date}.`) + renderNoteForm();
  }
  const text = vm.lines
    .map((line) => `<p class="summary-line">${escapeHtml(line)}</p>`)
    .join("");
  const chips = vm.chips.length
    ? `<div class="stat-chips">${vm.chips.map(renderChip).join("")}</div>`
    : "";
  const notes = vm.noteHooks.length
    ? [
        `<div class="notes">`,
        `<h3>Clinician notes</h3>`,
        `<ul class="notes__list">`,
        ...vm.noteHooks.map((n) => `<li>${escapeHtml(n)}</li>`),
        `</ul></div>`,
      ].join("")
    : "";
  return `${chips}<div class="summary-text">${text}</div>${notes}${renderNoteForm()}`;
}
