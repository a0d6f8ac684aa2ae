import { describe, expect, it } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";
import { baselinePlan, budgetView, evenSplit, gainPercent } from "../src/budget.js";
import type { BudgetPlan } from "../src/types.js";
import { fixture, fixtureFetch } from "./helpers.js";

function optimizeRoutes() {
  return [
    {
      method: "POST" as const,
      path: "/api/budget/optimize",
      body: { budget: 4_000_000, needs: ["GK", "DEF"] },
      payload: fixture<BudgetPlan>("optimize_4m"),
    },
    {
      method: "POST" as const,
      path: "/api/budget/optimize",
      body: { budget: 6_000_000, needs: ["GK", "DEF"] },
      payload: fixture<BudgetPlan>("optimize_6m"),
    },
    {
      method: "POST" as const,
      path: "/api/budget/optimize",
      body: { budget: 2_000_000, needs: ["GK"] },
      payload: fixture<BudgetPlan>("optimize_gk_2m"),
    },
    {
      method: "POST" as const,
      path: "/api/budget/optimize",
      body: { budget: 2_000_000, needs: ["DEF"] },
      payload: fixture<BudgetPlan>("optimize_def_2m"),
    },
    {
      method: "POST" as const,
      path: "/api/budget/optimize",
      body: { budget: 0, needs: ["GK"] },
      status: fixture<{ status: number }>("optimize_infeasible").status,
      payload: fixture<{ body: unknown }>("optimize_infeasible").body,
    },
  ];
}

describe("evenSplit", () => {
  it("splits evenly and conserves the total", () => {
    expect(evenSplit(4_000_000, 2)).toEqual([2_000_000, 2_000_000]);
    expect(evenSplit(5, 2)).toEqual([3, 2]);
    expect(evenSplit(1, 3)).toEqual([1, 0, 0]);
    for (const [budget, parts] of [[17, 4], [1_000_001, 3], [0, 2]] as const) {
      const shares = evenSplit(budget, parts);
      expect(shares.reduce((acc, share) => acc + share, 0)).toBe(budget);
    }
  });

  it("rejects a zero-part split", () => {
    expect(() => evenSplit(100, 0)).toThrow(/at least one part/);
  });
});

describe("budget panel", () => {
  it("joint optimizer beats the even-split baseline on an uneven market", async () => {
    const { fetchFn } = fixtureFetch(optimizeRoutes());
    const client = new ApiClient("", fetchFn);

    const plan = await client.optimizeBudget(4_000_000, ["GK", "DEF"]);
    const baseline = await baselinePlan(client, 4_000_000, ["GK", "DEF"]);

    expect(baseline).not.toBeNull();
    expect(plan.total_elpar).toBeGreaterThan(baseline!.totalElpar);
    expect(baseline!.totalSpend).toBeLessThanOrEqual(4_000_000);

    const view = budgetView(plan, baseline);
    expect(view.totalElpar).toBe(plan.total_elpar);
    expect(view.gainText).toBe(
      `${gainPercent(plan.total_elpar, baseline!.totalElpar).toFixed(1)}%`,
    );
    expect(Number.parseFloat(view.gainText!)).toBeGreaterThan(0);
  });

  it("never loses rating points when the budget grows", () => {
    const small = fixture<BudgetPlan>("optimize_4m");
    const large = fixture<BudgetPlan>("optimize_6m");
    expect(large.total_elpar).toBeGreaterThanOrEqual(small.total_elpar);
    expect(small.total_spend).toBeLessThanOrEqual(small.budget);
    expect(large.total_spend).toBeLessThanOrEqual(large.budget);
  });

  it("reports an infeasible budget with the service's own message", async () => {
    const { fetchFn } = fixtureFetch(optimizeRoutes());
    const client = new ApiClient("", fetchFn);

    const attempt = client.optimizeBudget(0, ["GK"]);
    await expect(attempt).rejects.toThrow(ApiError);
    await expect(attempt).rejects.toMatchObject({
      status: 400,
      detail: expect.stringContaining("buys nobody"),
    });
  });

  it("returns no baseline when a share cannot buy anyone", async () => {
    const { fetchFn } = fixtureFetch(optimizeRoutes());
    const client = new ApiClient("", fetchFn);

    expect(await baselinePlan(client, 0, ["GK"])).toBeNull();
  });

  it("spends each line's share inside its own sub-budget", async () => {
    const { fetchFn, calls } = fixtureFetch(optimizeRoutes());
    const client = new ApiClient("", fetchFn);

    const baseline = await baselinePlan(client, 4_000_000, ["GK", "DEF"]);
    expect(calls.map((call) => (call.body as { budget: number }).budget)).toEqual([
      2_000_000, 2_000_000,
    ]);
    for (const plan of baseline!.plans) {
      expect(plan.total_spend).toBeLessThanOrEqual(2_000_000);
      expect(plan.allocation).toHaveLength(1);
    }
  });

  it("lays the plan out with grouped spend and four-decimal points", () => {
    const plan = fixture<BudgetPlan>("optimize_4m");
    const view = budgetView(plan, null);
    expect(view.rows.map((row) => row.line)).toEqual(["GK", "DEF"]);
    expect(view.rows[0]!.spendText).toBe("€900,000");
    expect(view.rows[1]!.spendText).toBe("€3,100,000");
    expect(view.totalSpendText).toBe("€4,000,000");
    expect(view.baselineElparText).toBeNull();
    expect(view.gainText).toBeNull();
  });
});
