import { ApiClient, ApiError } from "./api.js";
import { baselinePlan, budgetView } from "./budget.js";
import { CANONICAL_FORMATIONS, parseFormation } from "./formation.js";
import {
  decodeSnapshot,
  defaultState,
  encodeSnapshot,
  formatPoints,
  MAX_RATING,
  MIN_RATING,
  setBudget,
  setFormation,
  setLabel,
  setOpponent,
  setRating,
  setWage,
  slotName,
  squadView,
  toSquadRequest,
  type WhatIfState,
} from "./state.js";
import type { Line, SquadEvaluation } from "./types.js";
import { LINES } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function errorText(error: unknown): string {
  if (error instanceof ApiError) {
    return typeof error.detail === "string" ? error.detail : JSON.stringify(error.detail);
  }
  return error instanceof Error ? error.message : String(error);
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function initApp(): void {
  const client = new ApiClient("");

  let state: WhatIfState = defaultState();
  let lastEvaluation: SquadEvaluation | null = null;
  let previousEvaluation: SquadEvaluation | null = null;
  let freshSlots: boolean[] = state.slots.map(() => false);
  let inFlight: AbortController | null = null;
  let budgetInFlight: AbortController | null = null;

  const formationButtons = el<HTMLDivElement>("formation-buttons");
  const customFormation = el<HTMLInputElement>("custom-formation");
  const applyCustom = el<HTMLButtonElement>("apply-custom");
  const slotGrid = el<HTMLDivElement>("slot-grid");
  const opponentGrid = el<HTMLDivElement>("opponent-grid");
  const evaluateButton = el<HTMLButtonElement>("evaluate");
  const staleBanner = el<HTMLDivElement>("stale-banner");
  const resultPanel = el<HTMLDivElement>("result-panel");
  const shareButton = el<HTMLButtonElement>("share");
  const shareStatus = el<HTMLSpanElement>("share-status");
  const modelInfo = el<HTMLDivElement>("model-info");
  const budgetInput = el<HTMLInputElement>("budget-amount");
  const needsBoxes = el<HTMLDivElement>("budget-needs");
  const optimizeButton = el<HTMLButtonElement>("optimize");
  const budgetPanel = el<HTMLDivElement>("budget-panel");

  function markStale(message: string): void {
    staleBanner.textContent = `Showing last good result. ${message}`;
    staleBanner.hidden = false;
  }

  function clearStale(): void {
    staleBanner.hidden = true;
  }

  function renderFormationButtons(): void {
    formationButtons.replaceChildren();
    for (const name of CANONICAL_FORMATIONS) {
      const button = document.createElement("button");
      button.textContent = name;
      button.className = name === state.formation ? "formation active" : "formation";
      button.addEventListener("click", () => applyFormation(name));
      formationButtons.append(button);
    }
  }

  function applyFormation(text: string): void {
    try {
      const changed = setFormation(state, text);
      state = changed.state;
      freshSlots = changed.fresh;
      clearStale();
      renderFormationButtons();
      renderSlots();
      void evaluate();
    } catch (error) {
      markStale(errorText(error));
    }
  }

  function renderSlots(): void {
    slotGrid.replaceChildren();
    state.slots.forEach((slot, index) => {
      const row = document.createElement("div");
      row.className = freshSlots[index] ? "slot fresh" : "slot";

      const lineTag = document.createElement("span");
      lineTag.className = "slot-label";
      lineTag.textContent = slot.line;
      row.append(lineTag);

      const label = document.createElement("input");
      label.type = "text";
      label.className = "slot-name";
      label.placeholder = slotName(slot, index);
      label.value = slot.label ?? "";
      label.addEventListener("change", () => {
        state = setLabel(state, index, label.value);
        renderResult();
      });
      row.append(label);

      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = String(MIN_RATING);
      slider.max = String(MAX_RATING);
      slider.step = "1";
      slider.value = String(slot.rating);

      const number = document.createElement("input");
      number.type = "number";
      number.min = String(MIN_RATING);
      number.max = String(MAX_RATING);
      number.step = "0.1";
      number.value = String(slot.rating);

      const onRating = (raw: string): void => {
        const rating = Number(raw);
        if (!Number.isFinite(rating)) return;
        state = setRating(state, index, rating);
        slider.value = raw;
        number.value = raw;
        void evaluate();
      };
      slider.addEventListener("change", () => onRating(slider.value));
      number.addEventListener("change", () => onRating(number.value));
      row.append(slider, number);

      const wage = document.createElement("input");
      wage.type = "number";
      wage.min = "0";
      wage.step = "500";
      wage.placeholder = "wage/month";
      wage.value = slot.wage === null ? "" : String(slot.wage);
      wage.addEventListener("change", () => {
        const raw = wage.value.trim();
        state = setWage(state, index, raw === "" ? null : Number(raw));
        void evaluate();
      });
      row.append(wage);

      slotGrid.append(row);
    });
  }

  function renderOpponent(): void {
    opponentGrid.replaceChildren();
    for (const line of LINES) {
      const label = document.createElement("label");
      label.textContent = line;
      const input = document.createElement("input");
      input.type = "number";
      input.min = String(MIN_RATING);
      input.max = String(MAX_RATING);
      input.placeholder = "replacement";
      const current = state.opponent[line];
      input.value = current === undefined ? "" : String(current);
      input.addEventListener("change", () => {
        const raw = input.value.trim();
        state = setOpponent(state, line, raw === "" ? null : Number(raw));
        void evaluate();
      });
      label.append(input);
      opponentGrid.append(label);
    }
  }

  function renderResult(): void {
    if (lastEvaluation === null) return;
    const names = state.slots.map((slot, i) => slotName(slot, i));
    const view = squadView(lastEvaluation, previousEvaluation, names);
    const probs = `
      <div class="probs">
        <span class="win">Win ${view.winText}${view.deltaWinText ? ` (${view.deltaWinText})` : ""}</span>
        <span class="draw">Draw ${view.drawText}${view.deltaDrawText ? ` (${view.deltaDrawText})` : ""}</span>
        <span class="loss">Loss ${view.lossText}${view.deltaLossText ? ` (${view.deltaLossText})` : ""}</span>
      </div>`;
    const header = view.wageTotalsText === null
      ? "<tr><th>Slot</th><th>Line</th><th>Rating</th><th>Points above replacement</th></tr>"
      : "<tr><th>Slot</th><th>Line</th><th>Rating</th><th>Points above replacement</th><th>Fair wage</th></tr>";
    const rows = view.rows
      .map((row) => {
        const wageCell = row.wageText === null ? "" : `<td>${row.wageText}</td>`;
        const cls = row.changed ? ' class="edited"' : "";
        return `<tr${cls}><td>${escapeHtml(row.name)}</td><td>${row.line}</td><td>${row.rating}</td><td>${row.elparText}</td>${wageCell}</tr>`;
      })
      .join("");
    const totals = view.wageTotalsText === null
      ? `<tr><td colspan="3">Total</td><td>${view.totalElparText}</td></tr>`
      : `<tr><td colspan="3">Total</td><td>${view.totalElparText}</td><td>${view.wageTotalsText}</td></tr>`;
    resultPanel.innerHTML = `${probs}<table>${header}${rows}${totals}</table>`;
  }

  async function evaluate(): Promise<void> {
    inFlight?.abort();
    const controller = new AbortController();
    inFlight = controller;
    evaluateButton.disabled = true;
    try {
      const evaluation = await client.evaluateSquad(toSquadRequest(state), controller.signal);
      if (controller !== inFlight) return;
      previousEvaluation = lastEvaluation;
      lastEvaluation = evaluation;
      clearStale();
      renderResult();
      window.location.hash = encodeSnapshot(state);
    } catch (error) {
      if (controller.signal.aborted) return;
      markStale(errorText(error));
    } finally {
      if (controller === inFlight) {
        inFlight = null;
        evaluateButton.disabled = false;
      }
    }
  }

  function renderBudgetError(message: string): void {
    budgetPanel.innerHTML = `<p class="budget-error">${escapeHtml(message)}</p>`;
  }

  async function optimize(): Promise<void> {
    budgetInFlight?.abort();
    const controller = new AbortController();
    budgetInFlight = controller;
    let budget: number;
    try {
      state = setBudget(state, Number(budgetInput.value));
      budget = state.budget;
    } catch (error) {
      renderBudgetError(errorText(error));
      return;
    }
    const needs = LINES.filter(
      (line) => el<HTMLInputElement>(`need-${line.toLowerCase()}`).checked,
    );
    if (needs.length === 0) {
      renderBudgetError("Pick at least one line to fill.");
      return;
    }
    optimizeButton.disabled = true;
    try {
      const plan = await client.optimizeBudget(budget, needs, controller.signal);
      const baseline = needs.length > 1
        ? await baselinePlan(client, budget, needs, controller.signal)
        : null;
      if (controller !== budgetInFlight) return;
      const view = budgetView(plan, baseline);
      const rows = view.rows
        .map(
          (row) =>
            `<tr><td>${row.line}</td><td>${row.rating}</td><td>${row.spendText}</td><td>${row.elparText}</td></tr>`,
        )
        .join("");
      const comparison = view.baselineElparText === null
        ? ""
        : `<p>Even-split baseline: ${view.baselineElparText} points. Joint plan gain: ${view.gainText}.</p>`;
      budgetPanel.innerHTML = `
        <table>
          <tr><th>Line</th><th>Rating</th><th>Spend</th><th>Points</th></tr>
          ${rows}
          <tr><td colspan="2">Total</td><td>${view.totalSpendText}</td><td>${view.totalElparText}</td></tr>
        </table>${comparison}`;
    } catch (error) {
      if (controller.signal.aborted) return;
      renderBudgetError(errorText(error));
    } finally {
      if (controller === budgetInFlight) {
        budgetInFlight = null;
        optimizeButton.disabled = false;
      }
    }
  }

  async function loadModelInfo(): Promise<void> {
    try {
      const doc = await client.getModel();
      const levels = LINES.map(
        (line) => `${line} ${formatPoints(doc.replacement_levels[line])}`,
      ).join(", ");
      modelInfo.textContent =
        `Model fit on ${doc.n_obs} matches` +
        `${doc.converged ? "" : " (not converged)"}. Replacement levels: ${levels}.`;
    } catch (error) {
      modelInfo.textContent = `Service unavailable: ${errorText(error)}`;
    }
  }

  applyCustom.addEventListener("click", () => applyFormation(customFormation.value));
  customFormation.addEventListener("keydown", (event) => {
    if (event.key === "Enter") applyFormation(customFormation.value);
  });
  evaluateButton.addEventListener("click", () => void evaluate());
  optimizeButton.addEventListener("click", () => void optimize());
  shareButton.addEventListener("click", () => {
    window.location.hash = encodeSnapshot(state);
    void navigator.clipboard
      ?.writeText(window.location.href)
      .then(() => (shareStatus.textContent = "link copied"))
      .catch(() => (shareStatus.textContent = "link in address bar"));
  });

  const token = window.location.hash.replace(/^#/, "");
  if (token !== "") {
    try {
      state = decodeSnapshot(token);
    } catch (error) {
      markStale(`Ignored snapshot in the link: ${errorText(error)}`);
    }
  }
  try {
    parseFormation(state.formation);
  } catch {
    state = defaultState();
  }

  budgetInput.value = String(state.budget);
  renderFormationButtons();
  renderSlots();
  renderOpponent();
  void loadModelInfo();
  void evaluate();
}

if (typeof document !== "undefined" && document.getElementById("slot-grid") !== null) {
  initApp();
}
