import type { Line } from "./types.js";

export interface FormationShape {
  name: string;
  def: number;
  mid: number;
  att: number;
}

export const CANONICAL_FORMATIONS = ["4-4-2", "4-3-3", "3-5-2", "4-5-1"] as const;

const FORMATION_PATTERN = /^(\d+)-(\d+)-(\d+)$/;

/**
 * Parse a "D-M-A" formation string. Any shape with three bands of at least
 * one player summing to ten outfielders is allowed, not just the canonical
 * four, so custom shapes like 2-6-2 work end to end.
 */
export function parseFormation(text: string): FormationShape {
  const trimmed = text.trim();
  const match = FORMATION_PATTERN.exec(trimmed);
  if (!match) {
    throw new Error(`formation must look like 4-4-2, got "${text}"`);
  }
  const def = Number(match[1]);
  const mid = Number(match[2]);
  const att = Number(match[3]);
  if (def < 1 || mid < 1 || att < 1) {
    throw new Error(`every band needs at least one player: ${trimmed}`);
  }
  if (def + mid + att !== 10) {
    throw new Error(`outfield players must total 10: ${trimmed}`);
  }
  return { name: `${def}-${mid}-${att}`, def, mid, att };
}

export function lineCounts(shape: FormationShape): Record<Line, number> {
  return { GK: 1, DEF: shape.def, MID: shape.mid, ATT: shape.att };
}

/** Slot order used everywhere in the UI: keeper first, then back to front. */
export function slotLines(shape: FormationShape): Line[] {
  const lines: Line[] = ["GK"];
  for (let i = 0; i < shape.def; i++) lines.push("DEF");
  for (let i = 0; i < shape.mid; i++) lines.push("MID");
  for (let i = 0; i < shape.att; i++) lines.push("ATT");
  return lines;
}

export interface SlotCarry {
  line: Line;
  rating: number;
  wage: number | null;
  label: string | null;
  /** True when the new shape added this slot and no rating carried over. */
  fresh: boolean;
}

/**
 * Reshape a squad into a new formation, keeping each band's ratings in
 * positional order. Bands that grow gain fresh slots at the fill rating;
 * bands that shrink drop players from the end.
 */
export function carryOver(
  current: { line: Line; rating: number; wage: number | null; label?: string | null }[],
  next: FormationShape,
  fillRating: number,
): SlotCarry[] {
  const byLine = new Map<Line, { rating: number; wage: number | null; label: string | null }[]>();
  for (const slot of current) {
    const bucket = byLine.get(slot.line) ?? [];
    bucket.push({ rating: slot.rating, wage: slot.wage, label: slot.label ?? null });
    byLine.set(slot.line, bucket);
  }
  const result: SlotCarry[] = [];
  for (const line of slotLines(next)) {
    const bucket = byLine.get(line) ?? [];
    const kept = bucket.shift();
    if (kept === undefined) {
      result.push({ line, rating: fillRating, wage: null, label: null, fresh: true });
    } else {
      result.push({ line, rating: kept.rating, wage: kept.wage, label: kept.label, fresh: false });
    }
  }
  return result;
}
