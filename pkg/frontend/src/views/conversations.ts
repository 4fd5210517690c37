// Panel E: the day's check-in conversation. Patient and assistant turns
// alternate sides; each patient turn is tinted by its triage tag and
// red-flag turns additionally carry a "care team alerted" badge.

import type { ConversationsPayload, TurnPayload } from "../types.js";
import { tagColor, type StatusColor } from "../colors.js";
import { escapeHtml, humanizeToken, utcTime } from "../format.js";
import { badge, emptyState } from "./shell.js";

export interface TurnVM {
  turnId: string;
  speaker: "assistant" | "patient";
  time: string;
  text: string;
  color: StatusColor;
  redFlag: boolean;
  symptoms: string[];
}

export interface ConversationsVM {
  date: string | null;
  turns: TurnVM[];
  redFlagCount: number;
}

function turnViewModel(turn: TurnPayload): TurnVM {
  return {
    turnId: turn.turn_id,
    speaker: turn.speaker,
    time: utcTime(turn.t),
    text: turn.text,
    color: tagColor(turn.tag),
    redFlag: turn.tag === "red_flag",
    symptoms: turn.extracted.map((s) =>
      s.negated ? `no ${humanizeToken(s.symptom)}` : humanizeToken(s.symptom),
    ),
  };
}

export function conversationsViewModel(payload: ConversationsPayload): ConversationsVM {
  const turns = payload.turns.map(turnViewModel);
  return {
    date: payload.date,
    turns,
    redFlagCount: turns.filter((t) => t.redFlag).length,
  };
}

export function conversationsBadge(vm: ConversationsVM): string {
  return vm.redFlagCount > 0 ? badge("red flag", "red") : "";
}

function renderTurn(turn: TurnVM): string {
  const chips = turn.symptoms
    .map((s) => `<span class="chip chip--symptom">${escapeHtml(s)}</span>`)
    .join("");
  const alertBadge = turn.redFlag ? badge("care team alerted", "red") : "";
  return [
    `<li class="turn turn--${turn.speaker} turn--${turn.color}" data-turn="${escapeHtml(turn.turnId)}">`,
    `<span class="turn__meta">${turn.speaker === "patient" ? "Patient" : "Assistant"} · ${turn.time} UTC</span>`,
    `<p class="turn__text">${escapeHtml(turn.text)}</p>`,
    chips || alertBadge ? `<div class="turn__tags">${chips}${alertBadge}</div>` : "",
    `</li>`,
  ].join("");
}

export function renderConversations(vm: ConversationsVM): string {
  if (!vm.turns.length) {
    const day = vm.date ? ` on ${vm.date}` : "";
    return emptyState(`No conversations${day}.`);
  }
  return `<ul class="turns">${vm.turns.map(renderTurn).join("")}</ul>`;
}
