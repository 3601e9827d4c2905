/** The assembled client: document view, toolbar, prompt composer, and the
 * busy/pulse/undo wiring against the editing service. */

import { ApiClient, ApiError, type FetchLike } from "./api.js";
import type {
  DocumentKind,
  HistoryView,
  ObjectRef,
  ObjectWord,
  OperationView,
  PointRef,
  ToolView,
} from "./types.js";
import { refKey } from "./types.js";
import { Store, toggleSelection } from "./state.js";
import { DocumentViewer } from "./documentView.js";
import { Toolbar } from "./toolbar.js";
import { PromptField, type DropTarget } from "./promptField.js";
import { draftIsEmpty, insertObjectWord, replaceWithObjectWord } from "./draft.js";

export interface AppOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
}

export class App {
  readonly store = new Store();
  readonly client: ApiClient;
  readonly root: HTMLElement;
  readonly viewer: DocumentViewer;
  readonly toolbar: Toolbar;
  readonly field: PromptField;

  private readonly undoButton: HTMLButtonElement;
  private readonly redoButton: HTMLButtonElement;
  private readonly stopButton: HTMLButtonElement;
  private readonly submitButton: HTMLButtonElement;
  private readonly noticeBox: HTMLElement;
  private listeningDocument: Document | null = null;
  private readonly onKeyDown = (event: KeyboardEvent) => this.handleKey(event);

  constructor(options: AppOptions = {}) {
    this.client = new ApiClient(options.baseUrl ?? "", options.fetchImpl);

    this.viewer = new DocumentViewer({
      onObjectClick: (ref, display, additive) => this.objectClicked(ref, display, additive),
      onCanvasClick: (point, additive) => this.canvasClicked(point, additive),
    });
    this.toolbar = new Toolbar((tool) => this.toolToggled(tool));
    this.field = new PromptField({
      onDrop: (word, at) => this.dropped(word, at),
      onSubmit: () => void this.submit(),
      onChipHover: (ref) => this.viewer.setReferent(ref === null ? null : refKey(ref)),
      svgRoot: () => this.viewer.svgRoot,
    });

    this.undoButton = button("undo", "Undo");
    this.redoButton = button("redo", "Redo");
    this.stopButton = button("stop", "Stop");
    this.submitButton = button("submit", "Apply");
    this.noticeBox = document.createElement("span");
    this.noticeBox.className = "notice";

    this.undoButton.addEventListener("click", () => void this.undo());
    this.redoButton.addEventListener("click", () => void this.redo());
    this.stopButton.addEventListener("click", () => void this.stop());
    this.submitButton.addEventListener("click", () => void this.submit());

    const topBar = document.createElement("div");
    topBar.className = "top-bar";
    topBar.append(this.undoButton, this.redoButton, this.stopButton, this.noticeBox);

    const promptRow = document.createElement("div");
    promptRow.className = "prompt-row";
    promptRow.append(this.field.root, this.submitButton);

    this.root = document.createElement("div");
    this.root.className = "directmanip-app";
    this.root.append(topBar, this.viewer.root, this.toolbar.root, promptRow);

    this.store.subscribe((state) => this.render());
    this.render();
  }

  mount(host: HTMLElement): void {
    host.appendChild(this.root);
    this.listeningDocument = host.ownerDocument;
    this.listeningDocument.addEventListener("keydown", this.onKeyDown);
  }

  dispose(): void {
    this.listeningDocument?.removeEventListener("keydown", this.onKeyDown);
    this.listeningDocument = null;
    this.root.remove();
  }

  get sessionId(): string | null {
    return this.store.state.session?.id ?? null;
  }

  async start(kind: DocumentKind, content: string): Promise<void> {
    const session = await this.client.createSession(kind, content);
    this.store.update((state) => {
      state.session = session;
    });
  }

  async attach(sessionId: string): Promise<void> {
    const session = await this.client.getSession(sessionId);
    this.store.update((state) => {
      state.session = session;
    });
  }

  // ---- interactions -------------------------------------------------------

  private objectClicked(ref: ObjectRef, display: string, additive: boolean): void {
    const armed = this.store.state.armedTool;
    if (armed !== null && armed.tool.kind === "slotted") {
      this.fillSlot(ref, display);
      return;
    }
    if (armed !== null && armed.tool.kind === "selectionApplied") {
      void this.invokeTool(armed.tool, [ref]);
      return;
    }
    this.store.update((state) => {
      state.pendingSelection = toggleSelection(state.pendingSelection, ref, additive);
    });
  }

  private canvasClicked(point: PointRef, additive: boolean): void {
    const armed = this.store.state.armedTool;
    if (armed !== null && armed.tool.kind === "slotted") {
      this.fillSlot(point, `(${point.x}, ${point.y})`);
      return;
    }
    if (armed !== null && armed.tool.kind === "selectionApplied") {
      void this.invokeTool(armed.tool, [point]);
      return;
    }
    this.store.update((state) => {
      state.pendingSelection = additive
        ? toggleSelection(state.pendingSelection, point, true)
        : [];
    });
  }

  private toolToggled(tool: ToolView): void {
    const state = this.store.state;
    if (state.busy) return;
    if (state.armedTool !== null && state.armedTool.tool.id === tool.id) {
      this.store.update((s) => {
        s.armedTool = null;
      });
      return;
    }
    if (tool.kind === "global") {
      void this.invokeTool(tool, []);
      return;
    }
    if (tool.kind === "selectionApplied" && state.pendingSelection.length > 0) {
      // fires once on the current selection; the mode is not kept
      void this.invokeTool(tool, [...state.pendingSelection]);
      return;
    }
    this.store.update((s) => {
      s.armedTool = { tool, nouns: [], displays: [] };
    });
  }

  private fillSlot(ref: ObjectRef, display: string): void {
    const armed = this.store.state.armedTool;
    if (armed === null) return;
    const nouns = [...armed.nouns, ref];
    const displays = [...armed.displays, display];
    if (nouns.length >= armed.tool.arity) {
      const tool = armed.tool;
      this.store.update((s) => {
        s.armedTool = null;
      });
      void this.invokeTool(tool, nouns);
      return;
    }
    this.store.update((s) => {
      s.armedTool = { tool: armed.tool, nouns, displays };
    });
  }

  private dropped(word: ObjectWord, at: DropTarget): void {
    const flushed = this.field.flushInput();
    const draft =
      at.kind === "word"
        ? replaceWithObjectWord(flushed, at.segIndex, at.start, at.end, word)
        : insertObjectWord(flushed, flushed.length, word);
    this.store.update((state) => {
      state.draft = draft;
    });
  }

  // ---- service calls ------------------------------------------------------

  async submit(): Promise<void> {
    const session = this.store.state.session;
    if (session === null || this.store.state.busy) return;
    const segments = this.field.collectSegments();
    if (draftIsEmpty(segments)) return;
    const selection = [...this.store.state.pendingSelection];
    const ok = await this.run(
      () =>
        this.client
          .preview(session.id, segments, selection)
          .then((preview) => preview.targets)
          .catch(() => []),
      () => this.client.submitPrompt(session.id, segments, selection),
    );
    if (ok) {
      this.field.clear();
      this.store.update((state) => {
        state.draft = [];
      });
    }
  }

  private async invokeTool(tool: ToolView, nouns: ObjectRef[]): Promise<void> {
    const session = this.store.state.session;
    if (session === null || this.store.state.busy) return;
    await this.run(
      () => Promise.resolve(nouns),
      () => this.client.invokeTool(session.id, tool.id, nouns),
    );
  }

  /** One mutating operation: pulse the about-to-change objects while the
   * call is in flight, then apply the confirmed result. */
  private async run(
    pulseTargets: () => Promise<ObjectRef[]>,
    call: () => Promise<OperationView>,
  ): Promise<boolean> {
    this.store.update((state) => {
      state.busy = true;
      state.notice = "";
    });
    try {
      const targets = await pulseTargets();
      this.store.update((state) => {
        state.pulsing = targets;
      });
      const operation = await call();
      this.store.update((state) => {
        if (state.session !== null) {
          state.session = {
            ...state.session,
            document: operation.document,
            canUndo: operation.canUndo,
            canRedo: operation.canRedo,
          };
        }
        state.lastChanges = operation.changes;
        state.pendingSelection = [];
        const failed = operation.targets.filter((target) => !target.ok);
        if (failed.length > 0) {
          state.notice = failed
            .map((target) => target.detail || "a target failed")
            .join("; ");
        }
      });
      await this.refresh();
      return true;
    } catch (error) {
      this.store.update((state) => {
        state.notice = describeError(error);
      });
      return false;
    } finally {
      this.store.update((state) => {
        state.busy = false;
      });
    }
  }

  private async refresh(): Promise<void> {
    const session = this.store.state.session;
    if (session === null) return;
    const view = await this.client.getSession(session.id);
    this.store.update((state) => {
      state.session = view;
    });
  }

  async undo(): Promise<void> {
    if (this.store.state.session?.canUndo !== true) return;
    await this.applyHistory((id) => this.client.undo(id));
  }

  async redo(): Promise<void> {
    if (this.store.state.session?.canRedo !== true) return;
    await this.applyHistory((id) => this.client.redo(id));
  }

  private async applyHistory(call: (id: string) => Promise<HistoryView>): Promise<void> {
    const session = this.store.state.session;
    if (session === null || this.store.state.busy) return;
    try {
      const view = await call(session.id);
      this.store.update((state) => {
        if (state.session !== null) {
          state.session = {
            ...state.session,
            document: view.document,
            canUndo: view.canUndo,
            canRedo: view.canRedo,
          };
        }
        state.lastChanges = null;
        state.pendingSelection = [];
        state.notice = "";
      });
      await this.refresh();
    } catch (error) {
      this.store.update((state) => {
        state.notice = describeError(error);
      });
    }
  }

  async stop(): Promise<void> {
    const session = this.store.state.session;
    if (session === null) return;
    try {
      await this.client.cancel(session.id);
    } catch (error) {
      this.store.update((state) => {
        state.notice = describeError(error);
      });
    }
  }

  // ---- rendering ----------------------------------------------------------

  private handleKey(event: KeyboardEvent): void {
    if ((event.ctrlKey || event.metaKey) && event.key.toLowerCase() === "z") {
      event.preventDefault();
      if (event.shiftKey) void this.redo();
      else void this.undo();
      return;
    }
    if (event.key === "Escape" && this.store.state.armedTool !== null) {
      this.store.update((state) => {
        state.armedTool = null;
      });
    }
  }

  private render(): void {
    const state = this.store.state;
    this.viewer.render(state);
    this.toolbar.render(state);
    this.field.render(state);
    const session = state.session;
    this.undoButton.disabled = session === null || state.busy || !session.canUndo;
    this.redoButton.disabled = session === null || state.busy || !session.canRedo;
    this.stopButton.hidden = !state.busy;
    this.submitButton.disabled = session === null || state.busy;
    this.noticeBox.textContent = state.notice;
    this.root.classList.toggle("busy", state.busy);
  }
}

function button(name: string, label: string): HTMLButtonElement {
  const element = document.createElement("button");
  element.type = "button";
  element.className = name;
  element.textContent = label;
  return element;
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  if (error instanceof Error) return error.message;
  return String(error);
}
