export { App, type AppOptions } from "./app.js";
export { ApiClient, ApiError, type FetchLike } from "./api.js";
export { Store, toggleSelection, type ArmedTool, type ViewState } from "./state.js";
export { DocumentViewer } from "./documentView.js";
export { Toolbar, partialLabel } from "./toolbar.js";
export { PromptField, type DropTarget } from "./promptField.js";
export {
  DRAG_MIME,
  decodeDragPayload,
  displayFor,
  encodeDragPayload,
  renderChip,
  truncate,
} from "./chips.js";
export {
  draftIsEmpty,
  draftText,
  insertObjectWord,
  isLiteral,
  normalizeSegments,
  replaceWithObjectWord,
} from "./draft.js";
export { byteLength, byteSlice, spansOverlap, tokenize, type TextToken } from "./text.js";
export * from "./types.js";

import { App, type AppOptions } from "./app.js";

/** Create an app, mount it into the host element, and return it. */
export function mount(host: HTMLElement, options: AppOptions = {}): App {
  const app = new App(options);
  app.mount(host);
  return app;
}
