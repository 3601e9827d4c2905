/** Pure transformations of the prompt draft: a list of literal and
 * object-word segments. */

import type { ObjectWord, Segment } from "./types.js";

export function isLiteral(segment: Segment): segment is { literal: string } {
  return "literal" in segment;
}

/** Merge adjacent literals and drop empty ones; object-words pass through. */
export function normalizeSegments(segments: Segment[]): Segment[] {
  const merged: Segment[] = [];
  for (const segment of segments) {
    if (isLiteral(segment)) {
      if (segment.literal === "") continue;
      const last = merged[merged.length - 1];
      if (last && isLiteral(last)) {
        merged[merged.length - 1] = { literal: last.literal + segment.literal };
        continue;
      }
    }
    merged.push(segment);
  }
  return merged;
}

export function draftIsEmpty(segments: Segment[]): boolean {
  return normalizeSegments(segments).every(
    (segment) => isLiteral(segment) && segment.literal.trim() === "",
  );
}

/** Insert an object-word at a segment index, padding with single spaces so
 * the chip never glues onto neighbouring text. */
export function insertObjectWord(
  segments: Segment[],
  index: number,
  word: ObjectWord,
): Segment[] {
  const result = segments.slice();
  const before = result[index - 1];
  if (before && isLiteral(before) && before.literal !== "" && !/\s$/.test(before.literal)) {
    result[index - 1] = { literal: before.literal + " " };
  }
  const after = result[index];
  if (after && isLiteral(after) && after.literal !== "" && !/^\s/.test(after.literal)) {
    result[index] = { literal: " " + after.literal };
  }
  result.splice(index, 0, { objectWord: word });
  return normalizeSegments(result);
}

/** Replace the characters [start, end) of the literal at segIndex with an
 * object-word — the "drop onto a word swaps the word for the chip" rule. */
export function replaceWithObjectWord(
  segments: Segment[],
  segIndex: number,
  start: number,
  end: number,
  word: ObjectWord,
): Segment[] {
  const target = segments[segIndex];
  if (!target || !isLiteral(target)) return insertObjectWord(segments, segIndex, word);
  const result = segments.slice();
  result.splice(
    segIndex,
    1,
    { literal: target.literal.slice(0, start) },
    { objectWord: word },
    { literal: target.literal.slice(end) },
  );
  return normalizeSegments(result);
}

/** The draft as plain text, object-words shown by display — used for labels. */
export function draftText(segments: Segment[]): string {
  return segments
    .map((segment) => (isLiteral(segment) ? segment.literal : segment.objectWord.display))
    .join("");
}
