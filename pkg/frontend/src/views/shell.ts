// Shared panel chrome: every panel renders inside the same card shell and
// uses the same loading / empty / error placeholders, so failure modes
// look uniform across the board.

import { escapeHtml } from "../format.js";

export function panel(id: string, title: string, body: string, badge = ""): string {
  return [
    `<section class="panel" id="panel-${id}">`,
    `<header class="panel__header"><h2>${escapeHtml(title)}</h2>${badge}</header>`,
    `<div class="panel__body">${body}</div>`,
    `</section>`,
  ].join("");
}

export function loadingState(): string {
  return `<p class="placeholder placeholder--loading">Loading…</p>`;
}

export function emptyState(message: string): string {
  return `<p class="placeholder placeholder--empty">${escapeHtml(message)}</p>`;
}

export function errorState(message: string): string {
  return (
    `<p class="placeholder placeholder--error" role="alert">` +
    `Could not load this panel: ${escapeHtml(message)}</p>`
  );
}

export function badge(text: string, color: string): string {
  return `<span class="badge badge--${color}">${escapeHtml(text)}</span>`;
}
