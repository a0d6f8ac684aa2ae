/** Payload shapes for the squad rating service. Field names mirror the JSON wire format. */

export type Line = "GK" | "DEF" | "MID" | "ATT";

export const LINES: readonly Line[] = ["GK", "DEF", "MID", "ATT"];

export function isLine(token: string): token is Line {
  return (LINES as readonly string[]).includes(token);
}

export interface ModelDocument {
  kind: string;
  schema_version: number;
  feature_order: string[];
  b1: number[];
  b2: number[];
  se1: number[];
  se2: number[];
  n_obs: number;
  final_nll: number;
  converged: boolean;
  replacement_levels: Record<Line, number>;
  metadata: Record<string, unknown>;
}

export interface FeatureDiffs {
  x_def: number;
  x_mid: number;
  x_att: number;
  x_gk: number;
}

export interface Prediction {
  lambda_home: number;
  lambda_away: number;
  p_win: number;
  p_draw: number;
  p_loss: number;
}

export interface ElparRequest {
  formation: string;
  line: Line;
  rating: number;
  perspective?: "symmetric" | "home" | "away";
}

export interface ElparResult {
  formation: string;
  line: Line;
  rating: number;
  points: number;
  delta_win: number;
  delta_draw: number;
  delta_loss: number;
}

export interface SquadPlayerInput {
  player_id: string;
  line: Line;
  rating: number;
  wage?: number;
}

export interface SquadRequest {
  formation: string;
  players: SquadPlayerInput[];
  opponent?: Partial<Record<Line, number>>;
}

export interface EvaluatedPlayer {
  player_id: string;
  line: Line;
  rating: number;
  elpar: number;
}

export interface SquadEvaluation {
  p_win: number;
  p_draw: number;
  p_loss: number;
  players: EvaluatedPlayer[];
  wage_redistribution: number[] | null;
}

export interface AllocationSlot {
  line: Line;
  rating: number;
  spend: number;
  elpar: number;
}

export interface BudgetPlan {
  budget: number;
  allocation: AllocationSlot[];
  total_spend: number;
  total_elpar: number;
}
