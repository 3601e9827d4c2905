import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import {
  decodeDragPayload,
  displayFor,
  encodeDragPayload,
  truncate,
} from "../src/chips.js";
import {
  draftIsEmpty,
  draftText,
  insertObjectWord,
  normalizeSegments,
  replaceWithObjectWord,
} from "../src/draft.js";
import { Store, toggleSelection } from "../src/state.js";
import { byteLength, byteSlice, spansOverlap, tokenize } from "../src/text.js";
import { partialLabel } from "../src/toolbar.js";
import { describeRef, refKey, refsEqual, type Segment } from "../src/types.js";

describe("byte-offset tokenization", () => {
  it("addresses ascii words by byte span", () => {
    expect(tokenize("a hot day")).toEqual([
      { text: "a", start: 0, end: 1 },
      { text: "hot", start: 2, end: 5 },
      { text: "day", start: 6, end: 9 },
    ]);
  });

  it("counts multibyte characters in bytes, not code units", () => {
    const tokens = tokenize("héllo 世界 x");
    expect(tokens).toEqual([
      { text: "héllo", start: 0, end: 6 },
      { text: "世界", start: 7, end: 13 },
      { text: "x", start: 14, end: 15 },
    ]);
    expect(byteLength("héllo 世界 x")).toBe(15);
    expect(byteSlice("héllo 世界 x", 7, 13)).toBe("世界");
  });

  it("keeps offsets across leading and repeated whitespace", () => {
    expect(tokenize("  two\n\nwords ")).toEqual([
      { text: "two", start: 2, end: 5 },
      { text: "words", start: 7, end: 12 },
    ]);
    expect(tokenize("")).toEqual([]);
  });

  it("reports span overlap half-open", () => {
    expect(spansOverlap(0, 3, 3, 6)).toBe(false);
    expect(spansOverlap(0, 4, 3, 6)).toBe(true);
    expect(spansOverlap(5, 6, 0, 10)).toBe(true);
  });
});

describe("refs", () => {
  it("keys each ref shape distinctly", () => {
    expect(refKey({ span: [3, 9] })).toBe("span:3:9");
    expect(refKey({ id: "c0" })).toBe("id:c0");
    expect(refKey({ x: 10, y: 20 })).toBe("point:10:20");
    expect(refsEqual({ id: "c0" }, { id: "c0" })).toBe(true);
    expect(refsEqual({ span: [0, 1] }, { x: 0, y: 1 })).toBe(false);
  });

  it("describes refs for fallback display", () => {
    expect(describeRef({ span: [3, 9] })).toBe("[3, 9)");
    expect(describeRef({ id: "c4" })).toBe("c4");
    expect(describeRef({ x: 110, y: 200 })).toBe("(110, 200)");
  });
});

describe("draft transformations", () => {
  const word = (display: string): Segment => ({
    objectWord: { ref: { id: display }, display },
  });

  it("merges adjacent literals and drops empties", () => {
    expect(
      normalizeSegments([
        { literal: "make " },
        { literal: "" },
        { literal: "it pop" },
        word("c0"),
        { literal: "" },
      ]),
    ).toEqual([{ literal: "make it pop" }, word("c0")]);
  });

  it("treats whitespace-only drafts as empty", () => {
    expect(draftIsEmpty([{ literal: "  " }, { literal: "" }])).toBe(true);
    expect(draftIsEmpty([word("c0")])).toBe(false);
    expect(draftIsEmpty([{ literal: "go" }])).toBe(false);
  });

  it("pads an inserted chip with spaces on both sides", () => {
    const inserted = insertObjectWord([{ literal: "connect" }], 1, {
      ref: { id: "c0" },
      display: "c0",
    });
    expect(inserted).toEqual([
      { literal: "connect " },
      { objectWord: { ref: { id: "c0" }, display: "c0" } },
    ]);
    const between = insertObjectWord(
      [{ literal: "from " }, { literal: "onwards" }],
      1,
      { ref: { x: 1, y: 2 }, display: "(1, 2)" },
    );
    expect(draftText(between)).toBe("from (1, 2) onwards");
  });

  it("replaces a word inside a literal with the chip", () => {
    const replaced = replaceWithObjectWord(
      [{ literal: "add a petal here please" }],
      0,
      12,
      16,
      { ref: { id: "c3" }, display: "petal" },
    );
    expect(replaced).toEqual([
      { literal: "add a petal " },
      { objectWord: { ref: { id: "c3" }, display: "petal" } },
      { literal: " please" },
    ]);
  });
});

describe("chips", () => {
  it("round-trips the drag payload", () => {
    const word = { ref: { span: [6, 9] as [number, number] }, display: "pan" };
    expect(decodeDragPayload(encodeDragPayload(word))).toEqual(word);
  });

  it("rejects empty and malformed payloads", () => {
    expect(decodeDragPayload("")).toBeNull();
    expect(decodeDragPayload("not json")).toBeNull();
    expect(decodeDragPayload('{"display":"x"}')).toBeNull();
  });

  it("derives displays from the document", () => {
    const doc = { kind: "text" as const, content: "a hot день", version: 0 };
    expect(displayFor(doc, { span: [2, 5] })).toBe("hot");
    expect(displayFor(doc, { x: 50, y: 60 })).toBe("(50, 60)");
    expect(displayFor(null, { id: "c2" })).toBe("c2");
    expect(truncate("a".repeat(40))).toHaveLength(24);
  });
});

describe("toolbar labels", () => {
  it("fills ? slots left to right", () => {
    expect(partialLabel("add a line from ? to ?", [])).toBe("add a line from ? to ?");
    expect(partialLabel("add a line from ? to ?", ["(50, 50)"])).toBe(
      "add a line from (50, 50) to ?",
    );
    expect(partialLabel("add a line from ? to ?", ["(50, 50)", "(1, 2)"])).toBe(
      "add a line from (50, 50) to (1, 2)",
    );
  });

  it("leaves labels without slots alone", () => {
    expect(partialLabel("synonym", ["x"])).toBe("synonym");
  });
});

describe("selection toggling", () => {
  it("replaces on plain click and toggles on additive click", () => {
    const hot = { span: [2, 5] as [number, number] };
    const cold = { span: [16, 20] as [number, number] };
    expect(toggleSelection([hot], cold, false)).toEqual([cold]);
    expect(toggleSelection([hot], cold, true)).toEqual([hot, cold]);
    expect(toggleSelection([hot, cold], cold, true)).toEqual([hot]);
  });
});

describe("store invariants", () => {
  it("clears pulsing whenever the busy flag drops", () => {
    const store = new Store();
    store.update((state) => {
      state.busy = true;
      state.pulsing = [{ id: "c0" }];
    });
    expect(store.state.pulsing).toHaveLength(1);
    store.update((state) => {
      state.busy = false;
    });
    expect(store.state.pulsing).toHaveLength(0);
  });

  it("refuses an armed slotted tool with every slot filled", () => {
    const store = new Store();
    const tool = { id: "t0", label: "grow ?", kind: "slotted" as const, arity: 1 };
    expect(() =>
      store.update((state) => {
        state.armedTool = { tool, nouns: [{ id: "c0" }], displays: ["c0"] };
      }),
    ).toThrow(/fire and disarm/);
  });

  it("notifies subscribers until they unsubscribe", () => {
    const store = new Store();
    let seen = 0;
    const stop = store.subscribe(() => {
      seen += 1;
    });
    store.update(() => {});
    stop();
    store.update(() => {});
    expect(seen).toBe(1);
  });
});

describe("api client", () => {
  it("sends json bodies and parses replies", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const client = new ApiClient("http://svc", async (url, init) => {
      calls.push({ url, init });
      return new Response(JSON.stringify({ targets: [] }), { status: 200 });
    });
    await client.preview("s0", [{ literal: "x" }], []);
    expect(calls[0]!.url).toBe("http://svc/sessions/s0/preview");
    expect(calls[0]!.init?.method).toBe("POST");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({
      segments: [{ literal: "x" }],
      selection: [],
    });
  });

  it("maps error envelopes onto ApiError", async () => {
    const client = new ApiClient("", async () =>
      new Response(JSON.stringify({ error: "Busy", message: "in flight" }), { status: 409 }),
    );
    const failure = await client.undo("s0").catch((error: unknown) => error);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(409);
    expect((failure as ApiError).code).toBe("Busy");
    expect((failure as ApiError).message).toBe("in flight");
  });

  it("treats 204 as a void reply", async () => {
    const client = new ApiClient("", async () => new Response(null, { status: 204 }));
    await expect(client.cancel("s0")).resolves.toBeUndefined();
  });

  it("copes with bodies that are not json", async () => {
    const client = new ApiClient("", async () => new Response("boom", { status: 500 }));
    const failure = await client.getSession("s0").catch((error: unknown) => error);
    expect((failure as ApiError).code).toBe("HttpError");
    expect((failure as ApiError).message).toMatch(/status 500/);
  });
});
