/** Continuous document rendering: text as selectable tokens, SVG with
 * per-element hit regions keyed by id. Highlights the current selection,
 * the last operation's changed ranges/ids, the pulse set while an
 * operation is in flight, and a hovered chip's referent. */

import type { ObjectRef, PointRef, SpanRef } from "./types.js";
import type { ViewState } from "./state.js";
import { isElementRef, isSpanRef, refKey } from "./types.js";
import { spansOverlap, tokenize } from "./text.js";
import { DRAG_MIME, encodeDragPayload } from "./chips.js";

export interface DocumentCallbacks {
  onObjectClick(ref: ObjectRef, display: string, additive: boolean): void;
  onCanvasClick(point: PointRef, additive: boolean): void;
}

export class DocumentViewer {
  readonly root: HTMLElement;
  /** live svg root of the current render, for chip thumbnails */
  svgRoot: SVGElement | null = null;

  private byKey = new Map<string, Element[]>();
  private referentKey: string | null = null;

  constructor(private readonly callbacks: DocumentCallbacks) {
    this.root = document.createElement("div");
    this.root.className = "document-view";
  }

  render(state: ViewState): void {
    this.root.textContent = "";
    this.byKey = new Map();
    this.svgRoot = null;
    const doc = state.session?.document;
    if (!doc) return;
    if (doc.kind === "text") this.renderText(doc.content, state);
    else this.renderSvg(doc.content, state);
    this.applyReferent();
  }

  /** Outline the referent of a hovered chip (or clear with null). */
  setReferent(key: string | null): void {
    this.referentKey = key;
    this.applyReferent();
  }

  private applyReferent(): void {
    for (const [key, elements] of this.byKey) {
      for (const element of elements) {
        element.classList.toggle("referent", key === this.referentKey);
      }
    }
  }

  private track(key: string, element: Element): void {
    const bucket = this.byKey.get(key);
    if (bucket) bucket.push(element);
    else this.byKey.set(key, [element]);
  }

  private renderText(content: string, state: ViewState): void {
    const selectionSpans = state.pendingSelection.filter(isSpanRef);
    const pulsingSpans = state.pulsing.filter(isSpanRef);
    const changedSpans =
      state.lastChanges?.kind === "text" ? (state.lastChanges.spans ?? []) : [];

    const box = document.createElement("div");
    box.className = "text-view";
    const encoder = new TextEncoder();
    let offset = 0;
    for (const piece of content.split(/(\s+)/)) {
      if (piece === "") continue;
      const width = encoder.encode(piece).length;
      if (/^\s+$/.test(piece)) {
        box.appendChild(document.createTextNode(piece));
        offset += width;
        continue;
      }
      const start = offset;
      const end = offset + width;
      offset = end;
      const token = document.createElement("span");
      token.className = "token";
      token.textContent = piece;
      token.dataset.start = String(start);
      token.dataset.end = String(end);
      token.draggable = true;

      const covers = (span: SpanRef) =>
        spansOverlap(start, end, span.span[0], span.span[1]);
      if (selectionSpans.some(covers)) token.classList.add("selected");
      if (pulsingSpans.some(covers)) token.classList.add("pulsing");
      if (changedSpans.some((c) => spansOverlap(start, end, c.span[0], c.span[1]))) {
        token.classList.add("changed");
      }
      this.track(refKey({ span: [start, end] }), token);

      token.addEventListener("click", (event: MouseEvent) => {
        event.stopPropagation();
        this.callbacks.onObjectClick(
          { span: [start, end] },
          piece,
          event.ctrlKey || event.metaKey,
        );
      });
      token.addEventListener("dragstart", (event: DragEvent) => {
        event.dataTransfer?.setData(
          DRAG_MIME,
          encodeDragPayload({ ref: { span: [start, end] }, display: piece }),
        );
      });
      box.appendChild(token);
    }
    this.root.appendChild(box);
  }

  private renderSvg(content: string, state: ViewState): void {
    const rootElement = parseSvgRoot(content);
    if (rootElement === null) {
      this.renderRawFallback(content);
      return;
    }

    const svg = document.importNode(rootElement, true) as unknown as SVGElement;
    this.svgRoot = svg;
    svg.classList.add("svg-view");

    const selectedIds = new Set(
      state.pendingSelection.filter(isElementRef).map((ref) => ref.id),
    );
    const pulsingIds = new Set(state.pulsing.filter(isElementRef).map((ref) => ref.id));
    const changed =
      state.lastChanges?.kind === "svg"
        ? new Set([
            ...(state.lastChanges.added ?? []),
            ...(state.lastChanges.modified ?? []),
          ])
        : new Set<string>();

    for (const element of Array.from(svg.querySelectorAll("[id]"))) {
      const id = element.getAttribute("id");
      if (id === null || id === "") continue;
      if (selectedIds.has(id)) element.classList.add("selected");
      if (pulsingIds.has(id)) element.classList.add("pulsing");
      if (changed.has(id)) element.classList.add("changed");
      this.track(refKey({ id }), element);

      const display = `${element.tagName.toLowerCase()} ${id}`;
      element.addEventListener("click", (event: Event) => {
        const mouse = event as MouseEvent;
        event.stopPropagation();
        this.callbacks.onObjectClick({ id }, display, mouse.ctrlKey || mouse.metaKey);
      });
      element.setAttribute("draggable", "true");
      element.addEventListener("dragstart", (event: Event) => {
        (event as DragEvent).dataTransfer?.setData(
          DRAG_MIME,
          encodeDragPayload({ ref: { id }, display }),
        );
      });
    }

    svg.addEventListener("click", (event: Event) => {
      const mouse = event as MouseEvent;
      const rect = svg.getBoundingClientRect();
      const point: PointRef = {
        x: Math.round(mouse.clientX - rect.left),
        y: Math.round(mouse.clientY - rect.top),
      };
      this.callbacks.onCanvasClick(point, mouse.ctrlKey || mouse.metaKey);
    });

    this.root.appendChild(svg);
  }

  private renderRawFallback(content: string): void {
    const raw = document.createElement("pre");
    raw.className = "raw-text";
    raw.textContent = content;
    this.root.appendChild(raw);
  }
}

const SVG_NS = "http://www.w3.org/2000/svg";

/** Parse svg markup and return its root element, or null when the markup
 * is not well-formed svg. Documents that omit the xmlns declaration are
 * re-parsed with it injected: without the namespace the elements would
 * carry svg tag names but never paint. */
function parseSvgRoot(content: string): Element | null {
  const first = tryParse(content);
  if (first === null) return null;
  if (first.namespaceURI === SVG_NS) return first;
  const patched = content.replace(/<svg(?=[\s>])/, `<svg xmlns="${SVG_NS}"`);
  return tryParse(patched) ?? first;
}

function tryParse(content: string): Element | null {
  let parsed: Document;
  try {
    parsed = new DOMParser().parseFromString(content, "image/svg+xml");
  } catch {
    return null;
  }
  const root = parsed.documentElement;
  if (
    !root ||
    root.tagName.toLowerCase() !== "svg" ||
    parsed.querySelector("parsererror") !== null
  ) {
    return null;
  }
  return root;
}
