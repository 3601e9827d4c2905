/** Test doubles: a scripted in-memory service behind a fetch-compatible
 * function that records every request, plus DOM event helpers. */

import type {
  ChangesView,
  DocumentKind,
  DocumentView,
  ObjectRef,
  OperationView,
  Segment,
  SessionView,
  TargetStatusView,
  ToolView,
} from "../src/types.js";
import { refKey } from "../src/types.js";
import { App } from "../src/app.js";

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

export class Deferred {
  promise: Promise<void>;
  resolve!: () => void;

  constructor() {
    this.promise = new Promise((resolve) => {
      this.resolve = resolve;
    });
  }
}

export interface ScriptedOperation {
  /** new document content; omitted = unchanged */
  content?: string;
  changes?: ChangesView;
  createdTool?: ToolView;
  label?: string;
  kind?: string;
  targets?: TargetStatusView[];
  /** error response instead of success */
  error?: { status: number; error: string; message: string };
  /** hold the response until resolved */
  gate?: Deferred;
}

interface FakeSession {
  view: SessionView;
  undoStack: DocumentView[];
  redoStack: DocumentView[];
}

function json(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export class FakeService {
  readonly requests: RecordedRequest[] = [];
  readonly sessions = new Map<string, FakeSession>();
  private readonly operations: ScriptedOperation[] = [];
  previewTargets: ObjectRef[] | null = null;
  private counter = 0;

  queue(operation: ScriptedOperation): void {
    this.operations.push(operation);
  }

  requestsTo(suffix: string): RecordedRequest[] {
    return this.requests.filter((request) => request.path.endsWith(suffix));
  }

  makeFetch() {
    return async (url: string, init?: RequestInit): Promise<Response> => {
      const method = init?.method ?? "GET";
      const body =
        typeof init?.body === "string" ? (JSON.parse(init.body) as unknown) : undefined;
      this.requests.push({ method, path: url, body });
      return this.route(method, url, body);
    };
  }

  private async route(method: string, path: string, body: unknown): Promise<Response> {
    if (method === "POST" && path === "/sessions") {
      const request = body as { kind: DocumentKind; content: string };
      const id = `s${this.counter++}`;
      const session: FakeSession = {
        view: {
          id,
          document: { kind: request.kind, content: request.content, version: 0 },
          toolbar: [],
          busy: false,
          canUndo: false,
          canRedo: false,
          eventLog: [{ at: "t", kind: "session", summary: `created ${request.kind} session` }],
        },
        undoStack: [],
        redoStack: [],
      };
      this.sessions.set(id, session);
      return json(201, session.view);
    }

    const matched = /^\/sessions\/([^/]+)(\/.*)?$/.exec(path);
    if (!matched) return json(404, { error: "UnknownRoute", message: path });
    const session = this.sessions.get(matched[1]!);
    if (!session) return json(404, { error: "UnknownSession", message: matched[1]! });
    const rest = matched[2] ?? "";

    if (method === "GET" && rest === "") return json(200, session.view);

    if (method === "POST" && rest === "/preview") {
      const request = body as { segments: Segment[]; selection: ObjectRef[] };
      return json(200, { targets: this.deriveTargets(request) });
    }

    if (method === "POST" && (rest === "/prompts" || /^\/tools\/[^/]+\/invoke$/.test(rest))) {
      const scripted = this.operations.shift() ?? {};
      if (scripted.gate) await scripted.gate.promise;
      if (scripted.error) {
        return json(scripted.error.status, {
          error: scripted.error.error,
          message: scripted.error.message,
        });
      }
      const before = session.view.document;
      const document: DocumentView = {
        kind: before.kind,
        content: scripted.content ?? before.content,
        version: before.version + 1,
      };
      session.undoStack.push(before);
      session.redoStack = [];
      const toolbar = scripted.createdTool
        ? [...session.view.toolbar, scripted.createdTool]
        : session.view.toolbar;
      session.view = {
        ...session.view,
        document,
        toolbar,
        canUndo: true,
        canRedo: false,
        eventLog: [
          ...session.view.eventLog,
          { at: "t", kind: rest === "/prompts" ? "prompt" : "invoke", summary: "ok" },
        ],
      };
      const operation: OperationView = {
        document,
        changes: scripted.changes ?? { kind: document.kind, spans: [] },
        kind: scripted.kind ?? "global",
        label: scripted.label ?? "",
        createdToolId: scripted.createdTool?.id ?? null,
        targets: scripted.targets ?? [],
        elapsedMs: 1,
        canUndo: true,
        canRedo: false,
      };
      return json(200, operation);
    }

    if (method === "POST" && rest === "/undo") {
      const previous = session.undoStack.pop();
      if (!previous) return json(422, { error: "NothingToUndo", message: "nothing to undo" });
      session.redoStack.push(session.view.document);
      session.view = {
        ...session.view,
        document: previous,
        canUndo: session.undoStack.length > 0,
        canRedo: true,
        eventLog: [...session.view.eventLog, { at: "t", kind: "undo", summary: "ok" }],
      };
      return json(200, {
        document: previous,
        canUndo: session.view.canUndo,
        canRedo: true,
      });
    }

    if (method === "POST" && rest === "/redo") {
      const next = session.redoStack.pop();
      if (!next) return json(422, { error: "NothingToRedo", message: "nothing to redo" });
      session.undoStack.push(session.view.document);
      session.view = {
        ...session.view,
        document: next,
        canUndo: true,
        canRedo: session.redoStack.length > 0,
        eventLog: [...session.view.eventLog, { at: "t", kind: "redo", summary: "ok" }],
      };
      return json(200, { document: next, canUndo: true, canRedo: session.view.canRedo });
    }

    if (method === "POST" && rest === "/cancel") {
      return new Response(null, { status: 204 });
    }

    return json(404, { error: "UnknownRoute", message: `${method} ${path}` });
  }

  /** Mirror of the service's feedback rule: selection refs first, then
   * prompt object-words, deduplicated. */
  private deriveTargets(request: { segments: Segment[]; selection: ObjectRef[] }): ObjectRef[] {
    if (this.previewTargets !== null) return this.previewTargets;
    const seen = new Set<string>();
    const targets: ObjectRef[] = [];
    const add = (ref: ObjectRef) => {
      const key = refKey(ref);
      if (!seen.has(key)) {
        seen.add(key);
        targets.push(ref);
      }
    };
    for (const ref of request.selection) add(ref);
    for (const segment of request.segments) {
      if ("objectWord" in segment) add(segment.objectWord.ref);
    }
    return targets;
  }
}

// ---- DOM helpers ------------------------------------------------------------

export class FakeDataTransfer {
  private readonly data = new Map<string, string>();
  effectAllowed = "all";
  dropEffect = "move";

  setData(type: string, value: string): void {
    this.data.set(type, value);
  }

  getData(type: string): string {
    return this.data.get(type) ?? "";
  }

  get types(): string[] {
    return [...this.data.keys()];
  }
}

export function dragEvent(type: string, dataTransfer: FakeDataTransfer): Event {
  const event = new Event(type, { bubbles: true, cancelable: true });
  Object.defineProperty(event, "dataTransfer", { value: dataTransfer });
  return event;
}

export function click(
  element: Element,
  options: { ctrlKey?: boolean; clientX?: number; clientY?: number } = {},
): void {
  element.dispatchEvent(
    new MouseEvent("click", { bubbles: true, cancelable: true, ...options }),
  );
}

export function keydown(
  target: EventTarget,
  key: string,
  options: { ctrlKey?: boolean; shiftKey?: boolean } = {},
): void {
  target.dispatchEvent(
    new KeyboardEvent("keydown", { bubbles: true, cancelable: true, key, ...options }),
  );
}

export async function flush(rounds = 6): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export async function until(check: () => boolean, timeoutMs = 2000): Promise<void> {
  const started = Date.now();
  while (!check()) {
    if (Date.now() - started > timeoutMs) throw new Error("condition never became true");
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}

export async function appWith(
  fake: FakeService,
  kind: DocumentKind,
  content: string,
): Promise<App> {
  const app = new App({ baseUrl: "", fetchImpl: fake.makeFetch() });
  app.mount(document.body);
  await app.start(kind, content);
  await flush();
  return app;
}

export function tokenNamed(root: ParentNode, text: string): HTMLElement {
  const token = [...root.querySelectorAll<HTMLElement>(".token")].find(
    (candidate) => candidate.textContent === text,
  );
  if (!token) throw new Error(`no token rendered for ${JSON.stringify(text)}`);
  return token;
}
