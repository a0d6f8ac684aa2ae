import { carryOver, parseFormation, slotLines } from "./formation.js";
import type { Line, SquadEvaluation, SquadPlayerInput, SquadRequest } from "./types.js";
import { LINES, isLine } from "./types.js";

export interface SlotEntry {
  line: Line;
  rating: number;
  wage: number | null;
  /** Display name only; never sent to the service. */
  label: string | null;
}

export interface WhatIfState {
  formation: string;
  slots: SlotEntry[];
  /** Opponent line ratings; empty means a full replacement-level opponent. */
  opponent: Partial<Record<Line, number>>;
  /** Transfer budget for the planning panel, whole euros. */
  budget: number;
}

export const MIN_RATING = 40;
export const MAX_RATING = 99;
export const DEFAULT_BUDGET = 4_000_000;

export function defaultState(formation = "4-4-2", rating = 70): WhatIfState {
  const shape = parseFormation(formation);
  return {
    formation: shape.name,
    slots: slotLines(shape).map((line) => ({ line, rating, wage: null, label: null })),
    opponent: {},
    budget: DEFAULT_BUDGET,
  };
}

export function slotName(slot: SlotEntry, index: number): string {
  return slot.label ?? `${slot.line} ${index + 1}`;
}

export function setRating(state: WhatIfState, index: number, rating: number): WhatIfState {
  if (!Number.isFinite(rating)) throw new Error(`rating must be a number, got ${rating}`);
  const slots = state.slots.map((slot, i) => (i === index ? { ...slot, rating } : slot));
  return { ...state, slots };
}

export function setWage(state: WhatIfState, index: number, wage: number | null): WhatIfState {
  if (wage !== null && (!Number.isInteger(wage) || wage < 0)) {
    throw new Error(`wage must be a whole non-negative amount, got ${wage}`);
  }
  const slots = state.slots.map((slot, i) => (i === index ? { ...slot, wage } : slot));
  return { ...state, slots };
}

export function setLabel(state: WhatIfState, index: number, label: string | null): WhatIfState {
  const cleaned = label === null || label.trim() === "" ? null : label.trim();
  const slots = state.slots.map((slot, i) => (i === index ? { ...slot, label: cleaned } : slot));
  return { ...state, slots };
}

export function setBudget(state: WhatIfState, budget: number): WhatIfState {
  if (!Number.isInteger(budget) || budget < 0) {
    throw new Error(`budget must be a whole non-negative amount, got ${budget}`);
  }
  return { ...state, budget };
}

export function setOpponent(state: WhatIfState, line: Line, rating: number | null): WhatIfState {
  const opponent = { ...state.opponent };
  if (rating === null) {
    delete opponent[line];
  } else {
    opponent[line] = rating;
  }
  return { ...state, opponent };
}

/**
 * Switch formation, carrying band ratings over positionally. New slots are
 * filled at the given rating; the returned flags mark which ones are new.
 */
export function setFormation(
  state: WhatIfState,
  formation: string,
  fillRating = 70,
): { state: WhatIfState; fresh: boolean[] } {
  const shape = parseFormation(formation);
  const carried = carryOver(state.slots, shape, fillRating);
  return {
    state: {
      ...state,
      formation: shape.name,
      slots: carried.map(({ line, rating, wage, label }) => ({ line, rating, wage, label })),
    },
    fresh: carried.map((slot) => slot.fresh),
  };
}

/** Build the evaluate request. Wages are sent only when every slot has one. */
export function toSquadRequest(state: WhatIfState): SquadRequest {
  const allWaged = state.slots.every((slot) => slot.wage !== null);
  const players: SquadPlayerInput[] = state.slots.map((slot, i) => {
    const player: SquadPlayerInput = {
      player_id: `p${i}`,
      line: slot.line,
      rating: slot.rating,
    };
    if (allWaged && slot.wage !== null) player.wage = slot.wage;
    return player;
  });
  const request: SquadRequest = { formation: state.formation, players };
  if (Object.keys(state.opponent).length > 0) {
    request.opponent = { ...state.opponent };
  }
  return request;
}

interface SnapshotV1 {
  v: 1;
  formation: string;
  slots: [number, number | null, string | null][];
  opponent: Partial<Record<string, number>>;
  budget?: number;
}

function toBase64Url(text: string): string {
  const bytes = new TextEncoder().encode(text);
  let binary = "";
  for (const byte of bytes) binary += String.fromCharCode(byte);
  return btoa(binary).replace(/\+/g, "-").replace(/\//g, "_").replace(/=+$/, "");
}

function fromBase64Url(text: string): string {
  const padded = text.replace(/-/g, "+").replace(/_/g, "/");
  const binary = atob(padded);
  const bytes = Uint8Array.from(binary, (char) => char.charCodeAt(0));
  return new TextDecoder().decode(bytes);
}

/** Encode the whole what-if state as a URL-fragment-safe token. */
export function encodeSnapshot(state: WhatIfState): string {
  const snapshot: SnapshotV1 = {
    v: 1,
    formation: state.formation,
    slots: state.slots.map((slot) => [slot.rating, slot.wage, slot.label]),
    opponent: state.opponent,
    budget: state.budget,
  };
  return toBase64Url(JSON.stringify(snapshot));
}

export function decodeSnapshot(token: string): WhatIfState {
  let parsed: unknown;
  try {
    parsed = JSON.parse(fromBase64Url(token));
  } catch {
    throw new Error("snapshot token is not decodable");
  }
  const snapshot = parsed as Partial<SnapshotV1>;
  if (snapshot.v !== 1 || typeof snapshot.formation !== "string" || !Array.isArray(snapshot.slots)) {
    throw new Error("snapshot token has an unknown layout");
  }
  const shape = parseFormation(snapshot.formation);
  const lines = slotLines(shape);
  if (snapshot.slots.length !== lines.length) {
    throw new Error(
      `snapshot has ${snapshot.slots.length} slots, formation ${shape.name} needs ${lines.length}`,
    );
  }
  const slots: SlotEntry[] = lines.map((line, i) => {
    const entry = snapshot.slots![i];
    if (!Array.isArray(entry) || typeof entry[0] !== "number" || !Number.isFinite(entry[0])) {
      throw new Error(`snapshot slot ${i} is malformed`);
    }
    const wage = entry[1] ?? null;
    if (wage !== null && (typeof wage !== "number" || !Number.isInteger(wage) || wage < 0)) {
      throw new Error(`snapshot slot ${i} has a malformed wage`);
    }
    const label = entry[2] ?? null;
    if (label !== null && typeof label !== "string") {
      throw new Error(`snapshot slot ${i} has a malformed label`);
    }
    return { line, rating: entry[0], wage, label };
  });
  const opponent: Partial<Record<Line, number>> = {};
  for (const [key, value] of Object.entries(snapshot.opponent ?? {})) {
    if (!isLine(key) || typeof value !== "number" || !Number.isFinite(value)) {
      throw new Error(`snapshot opponent entry ${key} is malformed`);
    }
    opponent[key] = value;
  }
  const budget = snapshot.budget ?? DEFAULT_BUDGET;
  if (!Number.isInteger(budget) || budget < 0) {
    throw new Error("snapshot budget is malformed");
  }
  return { formation: shape.name, slots, opponent, budget };
}

export function formatProb(p: number): string {
  return `${(100 * p).toFixed(2)}%`;
}

export function formatSignedProb(delta: number): string {
  const text = `${(100 * delta).toFixed(2)}%`;
  return delta >= 0 ? `+${text}` : text;
}

export function formatPoints(points: number): string {
  return points.toFixed(4);
}

export function formatEuro(amount: number): string {
  const sign = amount < 0 ? "-" : "";
  const digits = Math.abs(Math.round(amount)).toString();
  const grouped = digits.replace(/\B(?=(\d{3})+(?!\d))/g, ",");
  return `${sign}€${grouped}`;
}

export interface SquadViewRow {
  playerId: string;
  name: string;
  line: Line;
  rating: number;
  elpar: number;
  elparText: string;
  wageText: string | null;
  /** True when this slot's rating differs from the previous evaluation. */
  changed: boolean;
}

export interface SquadView {
  pWin: number;
  pDraw: number;
  pLoss: number;
  winText: string;
  drawText: string;
  lossText: string;
  deltaWinText: string | null;
  deltaDrawText: string | null;
  deltaLossText: string | null;
  rows: SquadViewRow[];
  totalElparText: string;
  wageTotalsText: string | null;
}

/**
 * Turn an evaluation response into display strings. Every number is taken
 * from the response as-is; the only arithmetic here is the delta against the
 * previous evaluation and column totals.
 */
export function squadView(
  evaluation: SquadEvaluation,
  previous: SquadEvaluation | null = null,
  names: string[] | null = null,
): SquadView {
  const comparable = previous !== null && previous.players.length === evaluation.players.length;
  const rows: SquadViewRow[] = evaluation.players.map((player, i) => ({
    playerId: player.player_id,
    name: names?.[i] ?? player.player_id,
    line: player.line,
    rating: player.rating,
    elpar: player.elpar,
    elparText: formatPoints(player.elpar),
    wageText:
      evaluation.wage_redistribution === null
        ? null
        : formatEuro(evaluation.wage_redistribution[i]!),
    changed: comparable && previous.players[i]!.rating !== player.rating,
  }));
  const totalElpar = evaluation.players.reduce((acc, player) => acc + player.elpar, 0);
  let wageTotalsText: string | null = null;
  if (evaluation.wage_redistribution !== null) {
    const total = evaluation.wage_redistribution.reduce((acc, wage) => acc + wage, 0);
    wageTotalsText = formatEuro(total);
  }
  return {
    pWin: evaluation.p_win,
    pDraw: evaluation.p_draw,
    pLoss: evaluation.p_loss,
    winText: formatProb(evaluation.p_win),
    drawText: formatProb(evaluation.p_draw),
    lossText: formatProb(evaluation.p_loss),
    deltaWinText: previous === null ? null : formatSignedProb(evaluation.p_win - previous.p_win),
    deltaDrawText: previous === null ? null : formatSignedProb(evaluation.p_draw - previous.p_draw),
    deltaLossText: previous === null ? null : formatSignedProb(evaluation.p_loss - previous.p_loss),
    rows,
    totalElparText: formatPoints(totalElpar),
    wageTotalsText,
  };
}

export { LINES };
