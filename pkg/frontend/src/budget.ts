import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import { formatEuro, formatPoints } from "./state.js";
import type { BudgetPlan, Line } from "./types.js";

/** Split a budget into near-equal integer parts, remainder to the front. */
export function evenSplit(budget: number, parts: number): number[] {
  if (parts < 1) throw new Error(`need at least one part, got ${parts}`);
  const base = Math.floor(budget / parts);
  const remainder = budget - base * parts;
  return Array.from({ length: parts }, (_, i) => base + (i < remainder ? 1 : 0));
}

export interface BaselinePlan {
  plans: BudgetPlan[];
  totalSpend: number;
  totalElpar: number;
}

/**
 * Naive comparison plan: give each needed line an equal share of the budget
 * and ask the service to fill it alone. The joint optimizer can always match
 * or beat this, because the per-line picks together fit the full budget.
 * Returns null when some share cannot buy anyone.
 */
export async function baselinePlan(
  client: ApiClient,
  budget: number,
  needs: Line[],
  signal?: AbortSignal,
): Promise<BaselinePlan | null> {
  const shares = evenSplit(budget, needs.length);
  const plans: BudgetPlan[] = [];
  for (let i = 0; i < needs.length; i++) {
    try {
      plans.push(await client.optimizeBudget(shares[i]!, [needs[i]!], signal));
    } catch (error) {
      if (error instanceof ApiError && error.status === 400) return null;
      throw error;
    }
  }
  return {
    plans,
    totalSpend: plans.reduce((acc, plan) => acc + plan.total_spend, 0),
    totalElpar: plans.reduce((acc, plan) => acc + plan.total_elpar, 0),
  };
}

export function gainPercent(optimized: number, baseline: number): number {
  if (baseline === 0) return 0;
  return (100 * (optimized - baseline)) / baseline;
}

export interface BudgetViewRow {
  line: Line;
  rating: number;
  spendText: string;
  elparText: string;
}

export interface BudgetView {
  rows: BudgetViewRow[];
  totalSpendText: string;
  totalElpar: number;
  totalElparText: string;
  baselineElparText: string | null;
  gainText: string | null;
}

export function budgetView(plan: BudgetPlan, baseline: BaselinePlan | null): BudgetView {
  const rows: BudgetViewRow[] = plan.allocation.map((slot) => ({
    line: slot.line,
    rating: slot.rating,
    spendText: formatEuro(slot.spend),
    elparText: formatPoints(slot.elpar),
  }));
  let baselineElparText: string | null = null;
  let gainText: string | null = null;
  if (baseline !== null) {
    baselineElparText = formatPoints(baseline.totalElpar);
    gainText = `${gainPercent(plan.total_elpar, baseline.totalElpar).toFixed(1)}%`;
  }
  return {
    rows,
    totalSpendText: formatEuro(plan.total_spend),
    totalElpar: plan.total_elpar,
    totalElparText: formatPoints(plan.total_elpar),
    baselineElparText,
    gainText,
  };
}
