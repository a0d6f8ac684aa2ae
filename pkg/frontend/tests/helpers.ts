import { readFileSync } from "node:fs";
import { isDeepStrictEqual } from "node:util";
import type { FetchLike } from "../src/api.js";

/** Load a captured service payload from tests/fixtures. */
export function fixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
  signal: AbortSignal | undefined;
}

export interface Route {
  method: "GET" | "POST";
  path: string;
  /** Match on the parsed request body; omit to match any body. */
  body?: unknown;
  status?: number;
  payload: unknown;
}

/**
 * In-memory stand-in for the service, answering from captured fixtures.
 * Requests must hit a route; anything unrouted fails the test loudly.
 */
export function fixtureFetch(routes: Route[]): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = (url, init) => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    calls.push({ url, method, body, signal: init?.signal ?? undefined });
    for (const route of routes) {
      if (route.method !== method) continue;
      if (!url.endsWith(route.path)) continue;
      if (route.body !== undefined && !isDeepStrictEqual(route.body, body)) continue;
      return Promise.resolve(
        new Response(JSON.stringify(route.payload), {
          status: route.status ?? 200,
          headers: { "Content-Type": "application/json" },
        }),
      );
    }
    throw new Error(`no fixture route for ${method} ${url} ${JSON.stringify(body)}`);
  };
  return { fetchFn, calls };
}
