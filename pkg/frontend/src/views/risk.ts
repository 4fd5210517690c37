// Panel D: explainable risk. Headline score with tier badge, the stored
// score trend as a sparkline, per-group attribution bars, and the written
// narrative. Scores, shares, and labels render exactly as the service
// reported them; bar widths and sparkline coordinates are those payload
// numbers mapped to pixels.

import type { RiskPayload } from "../types.js";
import { tierColor, type StatusColor } from "../colors.js";
import { escapeHtml, percent, utcDate } from "../format.js";
import { badge, emptyState } from "./shell.js";

export interface AttributionBarVM {
  groupId: string;
  label: string;
  widthPct: number;
  shareText: string;
}

export interface SparklineVM {
  /** SVG polyline points in a fixed 0..100 x 0..40 viewBox. */
  points: string;
  nPoints: number;
}

export interface RiskVM {
  hasAssessment: boolean;
  scoreText: string;
  tier: string;
  tierColor: StatusColor;
  horizonDays: number;
  assessedOn: string;
  source: string;
  modelState: "ok" | "unavailable";
  narrative: string;
  bars: AttributionBarVM[];
  sparkline: SparklineVM | null;
}

const SPARK_W = 100;
const SPARK_H = 40;

function sparklineViewModel(trend: RiskPayload["trend"]): SparklineVM | null {
  if (trend.length < 2) return null;
  const points = trend
    .map((point, i) => {
      const x = (i / (trend.length - 1)) * SPARK_W;
      // score 0 at the baseline, score 1 at the top edge
      const y = SPARK_H - point.score * SPARK_H;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return { points, nPoints: trend.length };
}

export function riskViewModel(payload: RiskPayload): RiskVM {
  const latest = payload.latest;
  if (latest === null) {
    return {
      hasAssessment: false,
      scoreText: "",
      tier: "",
      tierColor: "green",
      horizonDays: 0,
      assessedOn: "",
      source: "",
      modelState: payload.model_state,
      narrative: "",
      bars: [],
      sparkline: null,
    };
  }
  return {
    hasAssessment: true,
    scoreText: percent(latest.score),
    tier: latest.tier,
    tierColor: tierColor(latest.tier),
    horizonDays: latest.horizon_days,
    assessedOn: utcDate(latest.t),
    source: latest.source,
    modelState: payload.model_state,
    narrative: latest.narrative,
    bars: latest.attributions.map((a) => ({
      groupId: a.group_id,
      label: a.label,
      widthPct: Math.max(0, Math.min(100, a.share * 100)),
      shareText: percent(a.share),
    })),
    sparkline: sparklineViewModel(payload.trend),
  };
}

function renderBars(bars: AttributionBarVM[]): string {
  if (!bars.length) return "";
  const rows = bars.map((bar) =>
    [
      `<div class="attr-row" data-group="${escapeHtml(bar.groupId)}">`,
      `<span class="attr-row__label">${escapeHtml(bar.label)}</span>`,
      `<div class="attr-row__track"><div class="attr-row__fill" style="width:${bar.widthPct}%"></div></div>`,
      `<span class="attr-row__share">${escapeHtml(bar.shareText)}</span>`,
      `</div>`,
    ].join(""),
  );
  return `<div class="attr-bars"><h3>Contributing factors</h3>${rows.join("")}</div>`;
}

function renderSparkline(spark: SparklineVM | null): string {
  if (spark === null) return "";
  return [
    `<svg class="sparkline" viewBox="0 0 ${SPARK_W} ${SPARK_H}" preserveAspectRatio="none" `,
    `role="img" aria-label="Risk score trend, ${spark.nPoints} assessments">`,
    `<polyline points="${spark.points}" fill="none"></polyline>`,
    `</svg>`,
  ].join("");
}

export function renderRisk(vm: RiskVM): string {
  const offline =
    vm.modelState === "unavailable"
      ? `<p class="model-note">Risk model offline; showing stored assessments.</p>`
      : "";
  if (!vm.hasAssessment) {
    return offline + emptyState("No risk assessment available for this patient.");
  }
  const head = [
    `<div class="risk-head">`,
    `<span class="risk-head__score risk-head__score--${vm.tierColor}">${escapeHtml(vm.scoreText)}</span>`,
    `<div class="risk-head__meta">`,
    badge(vm.tier, vm.tierColor),
    `<span class="risk-head__horizon">${vm.horizonDays}-day horizon · assessed ${escapeHtml(vm.assessedOn)}</span>`,
    vm.source !== "model" ? `<span class="risk-head__source">source: ${escapeHtml(vm.source)}</span>` : "",
    `</div></div>`,
  ].join("");
  const narrative = vm.narrative
    ? `<p class="risk-narrative">${escapeHtml(vm.narrative)}</p>`
    : "";
  return offline + head + renderSparkline(vm.sparkline) + renderBars(vm.bars) + narrative;
}
