/** The prompt composer: committed segments (literal words and object-word
 * chips) plus a live text input for the tail of the draft. Dropping an
 * object onto a word swaps the word for the chip; dropping anywhere else
 * in the field appends the chip. */

import type { ObjectRef, ObjectWord, Segment } from "./types.js";
import type { ViewState } from "./state.js";
import { isLiteral, normalizeSegments } from "./draft.js";
import { DRAG_MIME, decodeDragPayload, renderChip } from "./chips.js";

export type DropTarget =
  | { kind: "append" }
  | { kind: "word"; segIndex: number; start: number; end: number };

export interface PromptFieldCallbacks {
  onDrop(word: ObjectWord, at: DropTarget): void;
  onSubmit(): void;
  onChipHover(ref: ObjectRef | null): void;
  svgRoot(): SVGElement | null;
}

export class PromptField {
  readonly root: HTMLElement;
  readonly input: HTMLInputElement;
  private readonly segmentsBox: HTMLElement;
  private draft: Segment[] = [];

  constructor(private readonly callbacks: PromptFieldCallbacks) {
    this.root = document.createElement("div");
    this.root.className = "prompt-field";

    this.segmentsBox = document.createElement("span");
    this.segmentsBox.className = "draft-segments";

    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.className = "prompt-input";

    this.root.append(this.segmentsBox, this.input);

    this.root.addEventListener("dragover", (event: DragEvent) => {
      event.preventDefault();
    });
    this.root.addEventListener("drop", (event: DragEvent) => this.handleDrop(event));
    this.input.addEventListener("keydown", (event: KeyboardEvent) => {
      if (event.key === "Enter" && !event.shiftKey) {
        event.preventDefault();
        this.callbacks.onSubmit();
      }
    });
  }

  render(state: ViewState): void {
    this.draft = state.draft;
    this.input.placeholder =
      state.pendingSelection.length > 0
        ? "Apply to selected elements"
        : "Describe an edit, or drop objects here";
    this.input.disabled = state.busy;

    this.segmentsBox.textContent = "";
    state.draft.forEach((segment, segIndex) => {
      if (isLiteral(segment)) {
        this.renderLiteral(segment.literal, segIndex);
      } else {
        const chip = renderChip(segment.objectWord, this.callbacks.svgRoot());
        const ref = segment.objectWord.ref;
        chip.addEventListener("mouseover", () => this.callbacks.onChipHover(ref));
        chip.addEventListener("mouseout", () => this.callbacks.onChipHover(null));
        this.segmentsBox.appendChild(chip);
      }
    });
  }

  /** Words inside committed literals are drop targets for replacement. */
  private renderLiteral(literal: string, segIndex: number): void {
    let at = 0;
    for (const piece of literal.split(/(\s+)/)) {
      if (piece === "") continue;
      if (/^\s+$/.test(piece)) {
        this.segmentsBox.appendChild(document.createTextNode(piece));
      } else {
        const word = document.createElement("span");
        word.className = "draft-word";
        word.textContent = piece;
        word.dataset.segIndex = String(segIndex);
        word.dataset.start = String(at);
        word.dataset.end = String(at + piece.length);
        this.segmentsBox.appendChild(word);
      }
      at += piece.length;
    }
  }

  private handleDrop(event: DragEvent): void {
    const raw = event.dataTransfer?.getData(DRAG_MIME) ?? "";
    const word = decodeDragPayload(raw);
    if (word === null) return; // not an object drag: leave the event alone
    event.preventDefault();

    const target = event.target instanceof Element ? event.target : null;
    const onWord = target?.closest<HTMLElement>(".draft-word") ?? null;
    if (onWord && onWord.dataset.segIndex !== undefined) {
      this.callbacks.onDrop(word, {
        kind: "word",
        segIndex: Number(onWord.dataset.segIndex),
        start: Number(onWord.dataset.start),
        end: Number(onWord.dataset.end),
      });
      return;
    }
    this.callbacks.onDrop(word, { kind: "append" });
  }

  /** The full draft: committed segments plus whatever is typed in the
   * tail input, normalized. */
  collectSegments(): Segment[] {
    return normalizeSegments([...this.draft, { literal: this.input.value }]);
  }

  /** Move the typed tail into the committed draft (called before a drop
   * is applied so typed text keeps its place ahead of the new chip). */
  flushInput(): Segment[] {
    const flushed = normalizeSegments([...this.draft, { literal: this.input.value }]);
    this.input.value = "";
    return flushed;
  }

  clear(): void {
    this.input.value = "";
  }
}
