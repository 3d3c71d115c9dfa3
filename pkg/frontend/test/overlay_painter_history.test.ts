import { describe, expect, it } from "vitest";

import { PromptHistory } from "../src/history.js";
import { composeOverlay, overlayPixels } from "../src/overlay.js";
import { MaskPainter } from "../src/painter.js";

describe("overlayPixels", () => {
  it("colors only masked pixels with the requested opacity", () => {
    const mask = new Uint8Array([1, 0, 0, 1]);
    const out = overlayPixels(mask, 2, 2, { color: [255, 0, 0], opacity: 0.5 });
    expect(Array.from(out.slice(0, 4))).toEqual([255, 0, 0, 128]);
    expect(Array.from(out.slice(4, 8))).toEqual([0, 0, 0, 0]);
    expect(out[15]).toBe(128);
  });

  it("validates dimensions", () => {
    expect(() => overlayPixels(new Uint8Array(3), 2, 2)).toThrow();
  });
});

describe("composeOverlay", () => {
  it("blends masked pixels, leaves the rest untouched", () => {
    const base = new Uint8ClampedArray([100, 100, 100, 255, 40, 40, 40, 255]);
    const out = composeOverlay(base, new Uint8Array([1, 0]), {
      color: [200, 0, 0],
      opacity: 0.5,
    });
    expect(Array.from(out.slice(0, 4))).toEqual([150, 50, 50, 255]);
    expect(Array.from(out.slice(4, 8))).toEqual([40, 40, 40, 255]);
    expect(Array.from(base.slice(0, 4))).toEqual([100, 100, 100, 255]); // input untouched
  });
});

describe("MaskPainter", () => {
  it("paints hard-binary circles and erases them", () => {
    const p = new MaskPainter(16, 16);
    expect(p.isEmpty()).toBe(true);
    p.brush(8, 8, 3);
    expect(p.mask[8 * 16 + 8]).toBe(1);
    expect(p.mask[0]).toBe(0);
    expect(new Set(p.mask)).toEqual(new Set([0, 1]));
    const painted = p.pixelCount();
    expect(painted).toBeGreaterThan(20);
    p.brush(8, 8, 3, true);
    expect(p.isEmpty()).toBe(true);
  });

  it("stroke leaves no gaps along a fast drag", () => {
    const p = new MaskPainter(64, 8);
    p.stroke(2, 4, 60, 4, 2);
    for (let x = 2; x <= 60; x++) {
      expect(p.mask[4 * 64 + x]).toBe(1);
    }
  });

  it("stays inside the canvas near edges", () => {
    const p = new MaskPainter(8, 8);
    p.brush(0, 0, 5);
    p.brush(7, 7, 5);
    expect(p.pixelCount()).toBeGreaterThan(0); // no out-of-bounds explosion
  });

  it("rejects degenerate sizes", () => {
    expect(() => new MaskPainter(0, 4)).toThrow();
  });
});

describe("PromptHistory", () => {
  const entry = (prompt: string, t = 0.5) => ({
    kind: "text" as const,
    prompt,
    threshold: t,
    recipe: "best",
    a: null,
  });

  it("stores parameters and returns copies", () => {
    const h = new PromptHistory();
    h.push(entry("dog"));
    const got = h.get(0);
    got.prompt = "mutated";
    expect(h.get(0).prompt).toBe("dog");
  });

  it("collapses immediate repeats but keeps distinct entries", () => {
    const h = new PromptHistory();
    h.push(entry("dog"));
    h.push(entry("dog"));
    h.push(entry("dog", 0.3));
    h.push(entry("cat"));
    expect(h.length).toBe(3);
  });

  it("is bounded", () => {
    const h = new PromptHistory(5);
    for (let i = 0; i < 20; i++) h.push(entry(`p${i}`));
    expect(h.length).toBe(5);
    expect(h.get(4).prompt).toBe("p19");
  });
});
