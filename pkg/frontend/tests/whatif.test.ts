import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import {
  defaultState,
  formatPoints,
  formatProb,
  setRating,
  setWage,
  squadView,
  toSquadRequest,
} from "../src/state.js";
import type { ModelDocument, SquadEvaluation, SquadRequest } from "../src/types.js";
import { fixture, fixtureFetch } from "./helpers.js";

function fixtureSquad() {
  let state = defaultState();
  for (let i = 0; i < 11; i++) {
    state = setWage(state, i, 10_000 + 1_000 * i);
  }
  return state;
}

function evaluateRoutes() {
  const cases = ["base", "def_up", "gk_up", "combined", "replacement"] as const;
  return cases.map((name) => ({
    method: "POST" as const,
    path: "/api/squad/evaluate",
    body: fixture<SquadRequest>(`evaluate_${name}_request`),
    payload: fixture<SquadEvaluation>(`evaluate_${name}`),
  }));
}

describe("what-if round trip", () => {
  it("sends exactly one request per evaluation and renders its numbers verbatim", async () => {
    const { fetchFn, calls } = fixtureFetch(evaluateRoutes());
    const client = new ApiClient("", fetchFn);

    const state = setRating(fixtureSquad(), 1, 78);
    const evaluation = await client.evaluateSquad(toSquadRequest(state));

    expect(calls).toHaveLength(1);
    expect(calls[0]!.method).toBe("POST");
    expect(calls[0]!.url).toBe("/api/squad/evaluate");

    const payload = fixture<SquadEvaluation>("evaluate_def_up");
    expect(evaluation).toEqual(payload);

    const view = squadView(evaluation);
    expect(view.pWin).toBe(payload.p_win);
    expect(view.pDraw).toBe(payload.p_draw);
    expect(view.pLoss).toBe(payload.p_loss);
    expect(view.winText).toBe(formatProb(payload.p_win));
    payload.players.forEach((player, i) => {
      expect(view.rows[i]!.elpar).toBe(player.elpar);
      expect(view.rows[i]!.elparText).toBe(formatPoints(player.elpar));
    });
  });

  it("shows exactly zero points for a player at the replacement rating", async () => {
    const model = fixture<ModelDocument>("model");
    const { fetchFn } = fixtureFetch(evaluateRoutes());
    const client = new ApiClient("", fetchFn);

    const state = setRating(fixtureSquad(), 5, model.replacement_levels.MID);
    const evaluation = await client.evaluateSquad(toSquadRequest(state));

    expect(evaluation.players[5]!.elpar).toBe(0);
    const view = squadView(evaluation);
    expect(view.rows[5]!.elparText).toBe("0.0000");
  });

  it("moves the win probability less for a keeper upgrade than a defender upgrade", () => {
    const base = fixture<SquadEvaluation>("evaluate_base");
    const gkUp = fixture<SquadEvaluation>("evaluate_gk_up");
    const defUp = fixture<SquadEvaluation>("evaluate_def_up");

    const gkShift = Math.abs(gkUp.p_win - base.p_win);
    const defShift = Math.abs(defUp.p_win - base.p_win);
    expect(gkShift).toBeLessThan(defShift);

    const gkView = squadView(gkUp, base);
    const defView = squadView(defUp, base);
    expect(gkView.deltaWinText).not.toBe(defView.deltaWinText);
  });

  it("reaches the same request through two single swaps as through one combined edit", () => {
    const stepwise = setRating(setRating(fixtureSquad(), 1, 78), 9, 75);
    const reversed = setRating(setRating(fixtureSquad(), 9, 75), 1, 78);
    const combined = fixture<SquadRequest>("evaluate_combined_request");

    expect(toSquadRequest(stepwise)).toEqual(combined);
    expect(toSquadRequest(reversed)).toEqual(combined);
  });

  it("renders the combined response identically on both edit paths", async () => {
    const { fetchFn, calls } = fixtureFetch(evaluateRoutes());
    const client = new ApiClient("", fetchFn);

    const stepwise = setRating(setRating(fixtureSquad(), 1, 78), 9, 75);
    const direct = setRating(setRating(fixtureSquad(), 9, 75), 1, 78);

    const first = await client.evaluateSquad(toSquadRequest(stepwise));
    const second = await client.evaluateSquad(toSquadRequest(direct));

    expect(first).toEqual(second);
    expect(first).toEqual(fixture<SquadEvaluation>("evaluate_combined"));
    expect(calls).toHaveLength(2);

    const base = fixture<SquadEvaluation>("evaluate_base");
    expect(squadView(first, base)).toEqual(squadView(second, base));
  });

  it("passes wages through and gets a conserving redistribution back", async () => {
    const { fetchFn, calls } = fixtureFetch(evaluateRoutes());
    const client = new ApiClient("", fetchFn);

    const evaluation = await client.evaluateSquad(toSquadRequest(fixtureSquad()));

    const sent = (calls[0]!.body as SquadRequest).players.map((player) => player.wage!);
    const paid = sent.reduce((acc, wage) => acc + wage, 0);
    const redistributed = evaluation.wage_redistribution!.reduce((acc, wage) => acc + wage, 0);
    expect(redistributed).toBe(paid);
  });
});
