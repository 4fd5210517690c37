// Panel orchestration. The controller owns the view state and one data
// slot per panel; every slot fetch carries a sequence number and a
// response only lands if it is still the newest request for that slot.
// That discard rule is what keeps a slow older response from overwriting
// a newer one during fast navigation or overlapping polls.

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";

/** The slice of the client the controller uses; tests stub this shape. */
export type PanelApi = Pick<
  ApiClient,
  "patients" | "patient" | "summary" | "vitals" | "risk" | "conversations" | "postNote"
>;
import { DAY_MS, dateToMs, escapeHtml } from "./format.js";
import { formatHash, type ViewState } from "./state.js";
import type {
  ConversationsPayload,
  PatientListPayload,
  PatientPayload,
  RiskPayload,
  SummaryPayload,
  VitalsPayload,
} from "./types.js";
import { conversationsBadge, conversationsViewModel, renderConversations } from "./views/conversations.js";
import { patientCardViewModel, renderPatientCard } from "./views/patient.js";
import { renderRisk, riskViewModel } from "./views/risk.js";
import { renderSummary, summaryBadge, summaryViewModel } from "./views/summary.js";
import { errorState, loadingState, panel } from "./views/shell.js";
import {
  hourlyViewModel,
  renderVitals,
  TREND_WINDOW_DAYS,
  trendViewModel,
} from "./views/vitals.js";

export type PanelKey = "patient" | "summary" | "vitals" | "risk" | "conversations";

export type Slot<T> =
  | { kind: "loading" }
  | { kind: "ready"; payload: T }
  | { kind: "error"; message: string };

interface Slots {
  patient: Slot<PatientPayload>;
  summary: Slot<SummaryPayload>;
  vitals: Slot<VitalsPayload>;
  risk: Slot<RiskPayload>;
  conversations: Slot<ConversationsPayload>;
}

const PANEL_KEYS: readonly PanelKey[] = [
  "patient",
  "summary",
  "vitals",
  "risk",
  "conversations",
];

function loadingSlots(): Slots {
  return {
    patient: { kind: "loading" },
    summary: { kind: "loading" },
    vitals: { kind: "loading" },
    risk: { kind: "loading" },
    conversations: { kind: "loading" },
  };
}

export interface ControllerOptions {
  /** "Today" for default date selection; injectable for tests. */
  today: string;
  /** Called whenever the canonical hash for the current state changes. */
  onHashChange?: (hash: string) => void;
  /** Author recorded on notes posted from this dashboard. */
  noteAuthor?: string;
}

export class DashboardController {
  private readonly api: PanelApi;
  private readonly sink: (html: string) => void;
  private readonly opts: ControllerOptions;

  private state: ViewState;
  private slots: Slots = loadingSlots();
  private seq: Record<PanelKey, number> = {
    patient: 0,
    summary: 0,
    vitals: 0,
    risk: 0,
    conversations: 0,
  };
  private roster: PatientListPayload | null = null;
  private rosterError: string | null = null;
  private noteStatus: string | null = null;

  constructor(api: PanelApi, sink: (html: string) => void, opts: ControllerOptions) {
    this.api = api;
    this.sink = sink;
    this.opts = opts;
    this.state = {
      patientId: null,
      date: opts.today,
      metric: "heart_rate",
      drillDay: null,
    };
  }

  getState(): ViewState {
    return { ...this.state };
  }

  /** Fetch the roster, settle on a patient, and load every panel. */
  async start(initial: ViewState): Promise<void> {
    this.state = { ...initial };
    this.rosterError = null;
    this.render();
    try {
      this.roster = await this.api.patients();
    } catch (err) {
      this.roster = null;
      this.rosterError = describeError(err);
      this.slots = {
        patient: errorSlot(this.rosterError),
        summary: errorSlot(this.rosterError),
        vitals: errorSlot(this.rosterError),
        risk: errorSlot(this.rosterError),
        conversations: errorSlot(this.rosterError),
      };
      this.render();
      return;
    }
    const ids = this.roster.patients.map((p) => p.patient_id);
    if (this.state.patientId === null || !ids.includes(this.state.patientId)) {
      this.state.patientId = ids[0] ?? null;
    }
    this.announceHash();
    this.loadPanels(PANEL_KEYS);
  }

  /** Move to a new view state, refetching only the panels it affects. */
  navigate(next: ViewState): void {
    const prev = this.state;
    this.state = { ...next };
    if (next.patientId !== prev.patientId) {
      this.announceHash();
      this.loadPanels(PANEL_KEYS);
      return;
    }
    const affected = new Set<PanelKey>();
    if (next.date !== prev.date) {
      affected.add("summary");
      affected.add("conversations");
      affected.add("vitals"); // the trend window ends at the selected date
    }
    if (next.metric !== prev.metric || next.drillDay !== prev.drillDay) {
      affected.add("vitals");
    }
    this.announceHash();
    if (affected.size) this.loadPanels([...affected]);
    else this.render();
  }

  /** Re-pull every panel; used by the poll timer and the retry button. */
  refresh(): void {
    if (this.roster === null) {
      // the roster fetch itself failed; start over from scratch
      void this.start(this.state);
      return;
    }
    this.loadPanels(PANEL_KEYS);
  }

  /** UI events arrive here as (action, dataset) pairs from main.ts. */
  handleAction(action: string, data: Record<string, string | undefined>): void {
    switch (action) {
      case "drill":
        if (data.day) this.navigate({ ...this.state, drillDay: data.day });
        break;
      case "trend-back":
        this.navigate({ ...this.state, drillDay: null });
        break;
      case "set-metric":
        if (data.metric) {
          // deliberately leaves drillDay alone: toggling the metric while
          // drilled in stays on the same day
          this.navigate({ ...this.state, metric: data.metric as ViewState["metric"] });
        }
        break;
      case "select-patient":
        if (data.patient) {
          this.navigate({ ...this.state, patientId: data.patient, drillDay: null });
        }
        break;
      case "select-date":
        if (data.date) this.navigate({ ...this.state, date: data.date });
        break;
      case "retry":
        this.refresh();
        break;
      default:
        break;
    }
  }

  /** Post a clinician note for the selected day, then refetch the summary. */
  async submitNote(text: string): Promise<void> {
    const trimmed = text.trim();
    const patientId = this.state.patientId;
    if (!trimmed || patientId === null) return;
    // noon on the selected day keeps the note inside that day's window
    const t = dateToMs(this.state.date) + DAY_MS / 2;
    try {
      await this.api.postNote(patientId, this.opts.noteAuthor ?? "dashboard", trimmed, t);
      this.noteStatus = null;
    } catch (err) {
      this.noteStatus = `Note was not saved: ${describeError(err)}`;
      this.render();
      return;
    }
    this.loadPanels(["summary"]);
  }

  // -- data loading ---------------------------------------------------------

  private loadPanels(keys: readonly PanelKey[]): void {
    const patientId = this.state.patientId;
    if (patientId === null) {
      this.render();
      return;
    }
    for (const key of keys) this.loadSlot(key, patientId);
    this.render();
  }

  private fetcherFor(key: PanelKey, patientId: string): Promise<unknown> {
    const { date, metric, drillDay } = this.state;
    switch (key) {
      case "patient":
        return this.api.patient(patientId);
      case "summary":
        return this.api.summary(patientId, date);
      case "risk":
        return this.api.risk(patientId);
      case "conversations":
        return this.api.conversations(patientId, date);
      case "vitals": {
        if (drillDay !== null) {
          const start = dateToMs(drillDay);
          return this.api.vitals(patientId, metric, start, start + DAY_MS, "hour");
        }
        const end = dateToMs(date) + DAY_MS;
        return this.api.vitals(patientId, metric, end - TREND_WINDOW_DAYS * DAY_MS, end, "day");
      }
    }
  }

  private loadSlot(key: PanelKey, patientId: string): void {
    const ticket = ++this.seq[key];
    const slots = this.slots as Record<PanelKey, Slot<unknown>>;
    slots[key] = { kind: "loading" };
    void this.fetcherFor(key, patientId)
      .then((payload) => {
        if (this.seq[key] !== ticket) return; // a newer request superseded this one
        slots[key] = { kind: "ready", payload };
        this.render();
      })
      .catch((err: unknown) => {
        if (this.seq[key] !== ticket) return;
        slots[key] = { kind: "error", message: describeError(err) };
        this.render();
      });
  }

  private announceHash(): void {
    this.opts.onHashChange?.(formatHash(this.state));
  }

  // -- rendering --------------------------------------------------------------

  private render(): void {
    this.sink(this.renderPage());
  }

  private renderHeader(): string {
    const options = (this.roster?.patients ?? [])
      .map((p) => {
        const selected = p.patient_id === this.state.patientId ? " selected" : "";
        return `<option value="${escapeHtml(p.patient_id)}"${selected}>${escapeHtml(p.name)}</option>`;
      })
      .join("");
    const anyError =
      this.rosterError !== null ||
      PANEL_KEYS.some((k) => this.slots[k].kind === "error");
    const retry = anyError
      ? `<button type="button" class="retry" data-action="retry">Retry</button>`
      : "";
    return [
      `<header class="topbar">`,
      `<h1>Cardiac monitoring</h1>`,
      `<label>Patient <select data-field="patient">${options}</select></label>`,
      `<label>Date <input type="date" data-field="date" value="${escapeHtml(this.state.date)}"></label>`,
      retry,
      `</header>`,
    ].join("");
  }

  private panelBody<T>(slot: Slot<T>, ready: (payload: T) => string): string {
    if (slot.kind === "loading") return loadingState();
    if (slot.kind === "error") return errorState(slot.message);
    return ready(slot.payload);
  }

  private renderPage(): string {
    const state = this.state;
    if (this.rosterError !== null) {
      const body = errorState(this.rosterError);
      return (
        this.renderHeader() +
        `<main class="grid">` +
        panel("patient", "Patient", body) +
        panel("summary", "Daily summary", body) +
        panel("vitals", "Wearable vitals", body) +
        panel("risk", "Cardiac risk", body) +
        panel("conversations", "Check-in conversations", body) +
        `</main>`
      );
    }
    if (state.patientId === null && this.roster !== null) {
      return this.renderHeader() + `<main class="grid"><p class="placeholder placeholder--empty">No patients registered.</p></main>`;
    }

    const summarySlot = this.slots.summary;
    const summaryVM =
      summarySlot.kind === "ready" ? summaryViewModel(summarySlot.payload) : null;
    const convSlot = this.slots.conversations;
    const convVM = convSlot.kind === "ready" ? conversationsViewModel(convSlot.payload) : null;

    const noteNotice = this.noteStatus
      ? `<p class="placeholder placeholder--error">${escapeHtml(this.noteStatus)}</p>`
      : "";

    return [
      this.renderHeader(),
      `<main class="grid">`,
      panel("patient", "Patient", this.panelBody(this.slots.patient, (p) => renderPatientCard(patientCardViewModel(p)))),
      panel(
        "summary",
        `Daily summary, ${escapeHtml(state.date)}`,
        this.panelBody(this.slots.summary, (s) => renderSummary(summaryViewModel(s))) + noteNotice,
        summaryVM ? summaryBadge(summaryVM) : "",
      ),
      panel("vitals", "Wearable vitals", this.panelBody(this.slots.vitals, (v) =>
        renderVitals(
          state.drillDay !== null
            ? hourlyViewModel(v, state.drillDay, state.metric)
            : trendViewModel(v, state.date, state.metric),
        ),
      )),
      panel("risk", "Cardiac risk", this.panelBody(this.slots.risk, (r) => renderRisk(riskViewModel(r)))),
      panel(
        "conversations",
        `Check-in conversations, ${escapeHtml(state.date)}`,
        this.panelBody(this.slots.conversations, (c) => renderConversations(conversationsViewModel(c))),
        convVM ? conversationsBadge(convVM) : "",
      ),
      `</main>`,
    ].join("");
  }
}

function errorSlot(message: string): Slot<never> {
  return { kind: "error", message };
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? err.message : `${err.message} (HTTP ${err.status})`;
  }
  return err instanceof Error ? err.message : String(err);
}
