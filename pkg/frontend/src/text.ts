/** Word tokenization addressed by UTF-8 byte offsets, matching the
 * service's span convention. */

export interface TextToken {
  text: string;
  start: number;
  end: number;
}

const encoder = new TextEncoder();
const decoder = new TextDecoder();

export function byteLength(text: string): number {
  return encoder.encode(text).length;
}

/** Slice a string by UTF-8 byte offsets. */
export function byteSlice(text: string, start: number, end: number): string {
  return decoder.decode(encoder.encode(text).slice(start, end));
}

/** Split text into whitespace-separated tokens with byte spans. */
export function tokenize(content: string): TextToken[] {
  const tokens: TextToken[] = [];
  let offset = 0;
  for (const piece of content.split(/(\s+)/)) {
    const width = byteLength(piece);
    if (piece !== "" && !/^\s+$/.test(piece)) {
      tokens.push({ text: piece, start: offset, end: offset + width });
    }
    offset += width;
  }
  return tokens;
}

export function spansOverlap(
  aStart: number,
  aEnd: number,
  bStart: number,
  bEnd: number,
): boolean {
  return aStart < bEnd && bStart < aEnd;
}
