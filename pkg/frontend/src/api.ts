import type {
  BudgetPlan,
  ElparRequest,
  ElparResult,
  FeatureDiffs,
  Line,
  ModelDocument,
  Prediction,
  SquadEvaluation,
  SquadRequest,
} from "./types.js";

/** Error carrying the HTTP status and the service's detail message. */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function defaultFetch(): FetchLike {
  return (url, init) => globalThis.fetch(url, init);
}

/**
 * Thin client for the squad rating service. All numbers shown in the UI come
 * out of these responses untouched; nothing is recomputed on the client.
 */
export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = defaultFetch()) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  getModel(signal?: AbortSignal): Promise<ModelDocument> {
    return this.request("GET", "/api/model", undefined, signal);
  }

  predict(features: FeatureDiffs, signal?: AbortSignal): Promise<Prediction> {
    return this.request("POST", "/api/predict", { features }, signal);
  }

  elpar(req: ElparRequest, signal?: AbortSignal): Promise<ElparResult> {
    return this.request("POST", "/api/elpar", req, signal);
  }

  evaluateSquad(req: SquadRequest, signal?: AbortSignal): Promise<SquadEvaluation> {
    return this.request("POST", "/api/squad/evaluate", req, signal);
  }

  optimizeBudget(
    budget: number,
    needs: Line[],
    signal?: AbortSignal,
  ): Promise<BudgetPlan> {
    return this.request("POST", "/api/budget/optimize", { budget, needs }, signal);
  }

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail: unknown;
      try {
        const parsed = (await response.json()) as { detail?: unknown };
        detail = parsed.detail ?? parsed;
      } catch {
        detail = response.statusText;
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }
}
