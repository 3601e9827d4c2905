/** Object-word chips: grey draggable pills showing a thumbnail of the
 * referenced SVG element or a short text/coordinate description. */

import type { DocumentView, ObjectRef, ObjectWord } from "./types.js";
import { describeRef, isElementRef, isPointRef, isSpanRef, refKey } from "./types.js";
import { byteSlice } from "./text.js";

export const DRAG_MIME = "application/x-object-word";

const CHIP_TEXT_LIMIT = 24;

export function truncate(text: string, limit: number = CHIP_TEXT_LIMIT): string {
  return text.length > limit ? text.slice(0, limit - 1) + "…" : text;
}

export function encodeDragPayload(word: ObjectWord): string {
  return JSON.stringify(word);
}

export function decodeDragPayload(raw: string): ObjectWord | null {
  if (raw === "") return null;
  try {
    const parsed: unknown = JSON.parse(raw);
    if (
      parsed !== null &&
      typeof parsed === "object" &&
      "ref" in parsed &&
      "display" in parsed &&
      typeof (parsed as ObjectWord).display === "string"
    ) {
      return parsed as ObjectWord;
    }
  } catch {
    // not a chip payload
  }
  return null;
}

/** Display string for a document object: the referenced text (truncated),
 * the element id, or the point coordinates. */
export function displayFor(doc: DocumentView | null, ref: ObjectRef): string {
  if (isSpanRef(ref) && doc !== null && doc.kind === "text") {
    const text = byteSlice(doc.content, ref.span[0], ref.span[1]);
    if (text !== "") return truncate(text);
  }
  if (isPointRef(ref)) return `(${ref.x}, ${ref.y})`;
  return describeRef(ref);
}

/** Clone the referenced element into a fixed-size viewport. */
function thumbnailOf(element: SVGElement): SVGSVGElement {
  const thumb = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  thumb.setAttribute("class", "chip-thumbnail");
  thumb.setAttribute("width", "16");
  thumb.setAttribute("height", "16");
  let viewBox = "0 0 16 16";
  const boxed = element as SVGElement & { getBBox?: () => DOMRect };
  if (typeof boxed.getBBox === "function") {
    try {
      const box = boxed.getBBox();
      if (box.width > 0 && box.height > 0) {
        viewBox = `${box.x} ${box.y} ${box.width} ${box.height}`;
      }
    } catch {
      // detached elements cannot be measured; keep the default viewport
    }
  }
  thumb.setAttribute("viewBox", viewBox);
  const clone = element.cloneNode(true) as Element;
  scrubClone(clone);
  thumb.appendChild(clone);
  return thumb;
}

/** Cloned thumbnails must not duplicate document ids or carry over the
 * selection/pulse highlight classes of their source element. */
function scrubClone(node: Element): void {
  node.removeAttribute("id");
  node.classList.remove("selected", "pulsing", "changed", "referent");
  if (node.getAttribute("class") === "") node.removeAttribute("class");
  for (const child of Array.from(node.children)) scrubClone(child);
}

export function renderChip(word: ObjectWord, svgRoot: SVGElement | null): HTMLElement {
  const chip = document.createElement("span");
  chip.className = "chip";
  chip.draggable = true;
  chip.dataset.refKey = refKey(word.ref);
  chip.title = word.display;
  if (isElementRef(word.ref) && svgRoot !== null) {
    const referent = svgRoot.querySelector(`[id="${word.ref.id}"]`);
    if (referent instanceof SVGElement) chip.appendChild(thumbnailOf(referent));
  }
  const label = document.createElement("span");
  label.className = "chip-label";
  label.textContent = word.display;
  chip.appendChild(label);
  chip.addEventListener("dragstart", (event: DragEvent) => {
    event.dataTransfer?.setData(DRAG_MIME, encodeDragPayload(word));
  });
  return chip;
}
