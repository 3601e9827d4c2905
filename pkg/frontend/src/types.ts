/** Wire types for the editing service's JSON API. */

export type DocumentKind = "text" | "svg";

export interface SpanRef {
  span: [number, number];
}

export interface ElementRef {
  id: string;
}

export interface PointRef {
  x: number;
  y: number;
}

export type ObjectRef = SpanRef | ElementRef | PointRef;

export interface ObjectWord {
  ref: ObjectRef;
  display: string;
}

export type Segment = { literal: string } | { objectWord: ObjectWord };

export interface DocumentView {
  kind: DocumentKind;
  content: string;
  version: number;
}

export type ToolKind = "global" | "selectionApplied" | "slotted";

export interface ToolView {
  id: string;
  label: string;
  kind: ToolKind;
  arity: number;
}

export interface TextChangeView {
  span: [number, number];
  kind: string;
}

export interface ChangesView {
  kind: DocumentKind;
  spans?: TextChangeView[];
  added?: string[];
  removed?: string[];
  modified?: string[];
}

export interface TargetStatusView {
  ref: ObjectRef;
  ok: boolean;
  detail: string;
}

export interface OperationView {
  document: DocumentView;
  changes: ChangesView;
  kind: string;
  label: string;
  createdToolId: string | null;
  targets: TargetStatusView[];
  elapsedMs: number;
  canUndo: boolean;
  canRedo: boolean;
}

export interface HistoryView {
  document: DocumentView;
  canUndo: boolean;
  canRedo: boolean;
}

export interface EventView {
  at: string;
  kind: string;
  summary: string;
}

export interface SessionView {
  id: string;
  document: DocumentView;
  toolbar: ToolView[];
  busy: boolean;
  canUndo: boolean;
  canRedo: boolean;
  eventLog: EventView[];
}

export interface PreviewView {
  targets: ObjectRef[];
}

export function isSpanRef(ref: ObjectRef): ref is SpanRef {
  return "span" in ref;
}

export function isElementRef(ref: ObjectRef): ref is ElementRef {
  return "id" in ref;
}

export function isPointRef(ref: ObjectRef): ref is PointRef {
  return "x" in ref;
}

/** Stable key so refs can live in sets and maps. */
export function refKey(ref: ObjectRef): string {
  if (isSpanRef(ref)) return `span:${ref.span[0]}:${ref.span[1]}`;
  if (isElementRef(ref)) return `id:${ref.id}`;
  return `point:${ref.x}:${ref.y}`;
}

export function refsEqual(a: ObjectRef, b: ObjectRef): boolean {
  return refKey(a) === refKey(b);
}

/** Human-readable fallback when no richer display is known. */
export function describeRef(ref: ObjectRef): string {
  if (isSpanRef(ref)) return `[${ref.span[0]}, ${ref.span[1]})`;
  if (isElementRef(ref)) return ref.id;
  return `(${ref.x}, ${ref.y})`;
}
