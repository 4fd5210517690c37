// Browser bootstrap: wires the controller to the real DOM, the location
// hash, and a poll timer. Everything interesting lives in app.ts and the
// view modules; this file is the only one that touches document/window.

import { ApiClient } from "./api.js";
import { DashboardController } from "./app.js";
import { resolveConfig, type DashboardConfig } from "./config.js";
import { utcDate } from "./format.js";
import { defaultState, parseHash } from "./state.js";

declare global {
  interface Window {
    __DASHBOARD_CONFIG__?: Partial<DashboardConfig>;
  }
}

function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");

  const config = resolveConfig(window.__DASHBOARD_CONFIG__);
  const api = new ApiClient(config);
  const today = utcDate(Date.now());

  const sink = (html: string): void => {
    // keep an in-progress note draft across re-renders (polls included)
    const draft = root.querySelector<HTMLInputElement>('[data-field="note-text"]');
    const draftValue = draft?.value ?? "";
    const hadFocus = draft !== null && document.activeElement === draft;
    root.innerHTML = html;
    const next = root.querySelector<HTMLInputElement>('[data-field="note-text"]');
    if (next && draftValue) next.value = draftValue;
    if (next && hadFocus) next.focus();
  };

  const controller = new DashboardController(api, sink, {
    today,
    noteAuthor: "dashboard",
    onHashChange: (hash) => {
      if (window.location.hash !== hash) window.location.hash = hash;
    },
  });

  root.addEventListener("click", (event) => {
    const el = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!el) return;
    const action = el.getAttribute("data-action");
    if (action === "submit-note") return; // handled by the submit listener
    if (action) {
      event.preventDefault();
      controller.handleAction(action, { ...el.dataset });
    }
  });

  root.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches('[data-field="patient"]')) {
      controller.handleAction("select-patient", {
        patient: (target as HTMLSelectElement).value,
      });
    } else if (target.matches('[data-field="date"]')) {
      const value = (target as HTMLInputElement).value;
      if (value) controller.handleAction("select-date", { date: value });
    }
  });

  root.addEventListener("submit", (event) => {
    const form = event.target as HTMLElement;
    if (!form.matches('[data-form="note"]')) return;
    event.preventDefault();
    const input = form.querySelector<HTMLInputElement>('[data-field="note-text"]');
    if (input && input.value.trim()) {
      const text = input.value;
      input.value = "";
      void controller.submitNote(text);
    }
  });

  window.addEventListener("hashchange", () => {
    controller.navigate(parseHash(window.location.hash, controller.getState()));
  });

  const initial = parseHash(window.location.hash, defaultState(today));
  void controller.start(initial).then(() => {
    window.setInterval(() => controller.refresh(), config.pollSeconds * 1000);
  });
}

bootstrap();
