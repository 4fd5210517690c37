// Renderers are pure string functions, so their output is snapshotted
// directly from the canned payloads. The explicit substring checks pin the
// headline display values; the snapshots catch everything else drifting.

import { describe, expect, it } from "vitest";

import { conversationsViewModel, renderConversations } from "../src/views/conversations.js";
import { patientCardViewModel, renderPatientCard } from "../src/views/patient.js";
import { renderRisk, riskViewModel } from "../src/views/risk.js";
import { renderSummary, summaryViewModel } from "../src/views/summary.js";
import { hourlyViewModel, renderVitals, trendViewModel } from "../src/views/vitals.js";
import { FIX } from "./stub.js";

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("patient card", () => {
  it("renders the demographics card", () => {
    const html = renderPatientCard(patientCardViewModel(FIX.patientEmily));
    expect(html).toContain("Emily Johnson");
    expect(html).toContain("Age 34, female");
    expect(html).toContain("Breast Cancer, stage IIA");
    expect(html).toMatchSnapshot();
  });
});

describe("risk panel", () => {
  it("renders the headline score with attribution bars", () => {
    const html = renderRisk(riskViewModel(FIX.riskEmily));
    expect(html).toContain(">70%<");
    expect(html).toContain("width:50%");
    expect(html).toContain("width:25%");
    expect(html).toContain("width:15%");
    expect(html).toContain("Chest Discomfort");
    expect(html).toContain("badge--red");
    expect(html).toContain("refer");
    expect(html).toMatchSnapshot();
  });

  it("renders the no-assessment empty state without bars", () => {
    const html = renderRisk(riskViewModel(FIX.riskMaria));
    expect(html).toContain("No risk assessment available");
    expect(html).not.toContain("attr-row");
    expect(html).toMatchSnapshot();
  });
});

describe("summary panel", () => {
  it("renders stat chips, the written summary, and notes", () => {
    const html = renderSummary(summaryViewModel(FIX.summaryEmily));
    expect(html).toContain("80.5");
    expect(html).toContain(">97<small>");
    expect(html).toContain("Daily summary for 2024-05-01");
    expect(html).toContain("Echo scheduled for next week; continue daily checks.");
    expect(html).toContain('data-form="note"');
    expect(html).toMatchSnapshot();
  });

  it("renders the empty state but keeps the note form", () => {
    const html = renderSummary(summaryViewModel(FIX.summaryMaria));
    expect(html).toContain("No data recorded for 2024-05-01.");
    expect(html).toContain('data-form="note"');
    expect(html).toMatchSnapshot();
  });
});

describe("vitals panel", () => {
  it("renders one clickable bar per monitored day in the trend", () => {
    const html = renderVitals(trendViewModel(FIX.vitalsDayEmily, "2024-05-01", "heart_rate"));
    expect(count(html, 'data-action="drill"')).toBe(7);
    expect(count(html, "bar-slot--empty")).toBe(7);
    expect(html).toContain('data-day="2024-04-28"');
    expect(html).toContain("Click a day for hourly detail");
    expect(html).toMatchSnapshot();
  });

  it("renders 24 hourly bars with the peak flagged", () => {
    const html = renderVitals(hourlyViewModel(FIX.vitalsHourAnomaly, "2024-04-28", "heart_rate"));
    expect(count(html, "bar--hour")).toBe(24);
    expect(count(html, "bar--peak")).toBe(1);
    expect(html).toContain("Peak at 14:00: mean 120.5 bpm");
    expect(html).toContain('data-action="trend-back"');
    expect(html).toMatchSnapshot();
  });

  it("renders a flat day without any peak flag", () => {
    const html = renderVitals(hourlyViewModel(FIX.vitalsHourShowcase, "2024-05-01", "heart_rate"));
    expect(count(html, "bar--hour")).toBe(24);
    expect(html).not.toContain("bar--peak");
  });

  it("marks the active metric toggle", () => {
    const html = renderVitals(trendViewModel(FIX.vitalsDayEmily, "2024-05-01", "spo2"));
    expect(html).toContain('toggle__btn--active" data-action="set-metric" data-metric="spo2"');
  });
});

describe("conversation panel", () => {
  it("tints the red-flag turn and shows the escalation badge", () => {
    const html = renderConversations(conversationsViewModel(FIX.conversationsEmily));
    expect(count(html, "turn--red")).toBe(1);
    expect(html).toContain("care team alerted");
    expect(html).toContain("I feel some chest discomfort");
    expect(count(html, "turn--green")).toBe(4);
    expect(html).toMatchSnapshot();
  });

  it("renders the empty-day placeholder", () => {
    const html = renderConversations(conversationsViewModel(FIX.conversationsMaria));
    expect(html).toContain("No conversations on 2024-05-01.");
  });
});
