/** Client view state and a minimal subscription store.
 *
 * Invariants:
 *  - while a slotted tool is armed, fewer nouns are filled than its arity
 *    (the last fill fires the invocation and disarms synchronously);
 *  - pulsing refs are non-empty only while an operation is in flight.
 */

import type {
  ChangesView,
  ObjectRef,
  Segment,
  SessionView,
  ToolView,
} from "./types.js";
import { refsEqual } from "./types.js";

export interface ArmedTool {
  tool: ToolView;
  nouns: ObjectRef[];
  displays: string[];
}

export interface ViewState {
  session: SessionView | null;
  pendingSelection: ObjectRef[];
  draft: Segment[];
  armedTool: ArmedTool | null;
  pulsing: ObjectRef[];
  busy: boolean;
  lastChanges: ChangesView | null;
  notice: string;
}

export type Listener = (state: ViewState) => void;

export class Store {
  readonly state: ViewState = {
    session: null,
    pendingSelection: [],
    draft: [],
    armedTool: null,
    pulsing: [],
    busy: false,
    lastChanges: null,
    notice: "",
  };

  private readonly listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      const at = this.listeners.indexOf(listener);
      if (at >= 0) this.listeners.splice(at, 1);
    };
  }

  update(mutate: (state: ViewState) => void): void {
    mutate(this.state);
    if (!this.state.busy) this.state.pulsing = [];
    const armed = this.state.armedTool;
    if (armed && armed.tool.kind === "slotted" && armed.nouns.length >= armed.tool.arity) {
      throw new Error("armed tool held a full noun set; it must fire and disarm instead");
    }
    for (const listener of this.listeners.slice()) listener(this.state);
  }
}

/** Ctrl-click semantics: additive clicks toggle membership, plain clicks
 * replace the whole selection. */
export function toggleSelection(
  selection: ObjectRef[],
  ref: ObjectRef,
  additive: boolean,
): ObjectRef[] {
  if (!additive) return [ref];
  const without = selection.filter((existing) => !refsEqual(existing, ref));
  if (without.length < selection.length) return without;
  return [...selection, ref];
}
