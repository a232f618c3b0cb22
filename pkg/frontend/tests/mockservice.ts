/** In-memory stand-in for the experiment service, speaking the same wire
 * contract (paths, payloads, status codes) over a fetch-compatible
 * function. Stored responses are frozen: append-only by construction. */

import type { TrialPayload } from "../src/types.js";

export class MockService {
  sessions = new Map<
    string,
    { trialIds: string[]; cursor: number; responded: Set<string> }
  >();
  store: ReadonlyArray<Readonly<Record<string, unknown>>> = [];

  constructor(readonly trials: TrialPayload[]) {}

  private json(body: unknown, status = 200): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  }

  private error(detail: string, status: number): Response {
    return this.json({ detail }, status);
  }

  fetch = async (input: RequestInfo | URL, init?: RequestInit):
      Promise<Response> => {
    const url = new URL(String(input), "http://mock");
    const path = url.pathname;
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;

    if (method === "POST" && path === "/sessions") {
      const id = `s-${body.subject_id}-${body.experiment}-${body.seed}`;
      if (this.sessions.has(id)) {
        return this.error(`session ${id} already exists`, 400);
      }
      const n = body.max_trials ?? this.trials.length;
      if (n > this.trials.length) {
        return this.error("cannot satisfy session constraints", 409);
      }
      this.sessions.set(id, {
        trialIds: this.trials.slice(0, n).map((t) => t.trial_id),
        cursor: 0,
        responded: new Set(),
      });
      return this.json(this.summary(id));
    }

    const sessionMatch = path.match(/^\/sessions\/([^/]+)(\/.*)?$/);
    if (sessionMatch) {
      const id = sessionMatch[1];
      const rest = sessionMatch[2] ?? "";
      const session = this.sessions.get(id);
      if (!session) return this.error(`unknown session ${id}`, 404);
      if (method === "GET" && rest === "") return this.json(this.summary(id));
      if (method === "GET" && rest === "/next") {
        if (session.cursor >= session.trialIds.length) {
          return this.json({ done: true, n_trials: session.trialIds.length });
        }
        const trial = this.trials.find(
          (t) => t.trial_id === session.trialIds[session.cursor],
        )!;
        return this.json({
          done: false,
          index: session.cursor,
          n_trials: session.trialIds.length,
          mode: "timed",
          trial,
        });
      }
      if (method === "POST" && rest === "/responses") {
        if (session.responded.has(body.trial_id)) {
          return this.error(`duplicate response for ${body.trial_id}`, 409);
        }
        if (session.trialIds[session.cursor] !== body.trial_id) {
          return this.error(`out-of-order response ${body.trial_id}`, 409);
        }
        const record = Object.freeze({
          kind: "response",
          session_id: id,
          trial_id: body.trial_id,
          raw_answer: body.raw_answer,
          timing: body.timing,
        });
        this.store = Object.freeze([...this.store, record]);
        session.responded.add(body.trial_id);
        session.cursor += 1;
        return this.json({
          accepted: true,
          cursor: session.cursor,
          remaining: session.trialIds.length - session.cursor,
        });
      }
    }
    return this.error(`no route ${method} ${path}`, 404);
  };

  private summary(id: string) {
    const s = this.sessions.get(id)!;
    return {
      session_id: id,
      subject_id: id.split("-")[1],
      experiment: "all",
      mode: "timed",
      n_trials: s.trialIds.length,
      cursor: s.cursor,
      done: s.cursor >= s.trialIds.length,
    };
  }
}
