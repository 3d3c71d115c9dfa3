// Workbench acceptance: round trip renders an overlay, the threshold
// slider issues zero network requests, and the interpolation slider's
// endpoints match direct service calls byte for byte.

import { describe, expect, it } from "vitest";

import { SegmentClient } from "../src/api.js";
import { decodeGray8Png } from "../src/png16.js";
import { Workbench } from "../src/workbench.js";
import { FakeSegmentServer, bytesEqual, encodeGray8Png } from "./helpers.js";

const encodeMask = async (mask: Uint8Array, width: number, height: number) => {
  const pixels = new Uint8Array(mask.length);
  for (let i = 0; i < mask.length; i++) pixels[i] = mask[i] ? 255 : 0;
  const png = await encodeGray8Png(pixels, width, height);
  return new Blob([png as BlobPart], { type: "image/png" });
};

function makeWorkbench(server: FakeSegmentServer) {
  const client = new SegmentClient("http://fake", server.fetch);
  return { wb: new Workbench({ client, encodeMask }), client };
}

const queryImage = () => new Blob([new Uint8Array([9, 9, 9, 1])], { type: "image/png" });
const supportImage = () => new Blob([new Uint8Array([5, 5, 5, 2])], { type: "image/png" });

function paintSupport(wb: Workbench): void {
  wb.setSupport(supportImage(), 16, 16);
  wb.painter!.brush(8, 8, 4);
}

describe("workbench round trip", () => {
  it("submit text prompt -> segmentation result and overlay rendered", async () => {
    const server = new FakeSegmentServer();
    const { wb } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "red circle";
    await wb.submit();
    expect(wb.error).toBeNull();
    expect(wb.result).not.toBeNull();
    expect(wb.result!.width).toBe(16);
    const overlay = wb.overlay()!;
    expect(overlay.length).toBe(16 * 16 * 4);
    // overlay alpha on exactly where the mask is on
    for (let i = 0; i < wb.result!.maskBits.length; i++) {
      expect(overlay[i * 4 + 3] > 0).toBe(wb.result!.maskBits[i] === 1);
    }
    expect(wb.history.length).toBe(1);
  });

  it("client-side mask equals the server's returned mask bit for bit", async () => {
    const server = new FakeSegmentServer();
    const { wb } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "blue square";
    await wb.submit();
    const serverMask = await decodeGray8Png(wb.result!.serverMaskPng);
    for (let i = 0; i < wb.result!.maskBits.length; i++) {
      expect(wb.result!.maskBits[i]).toBe(serverMask.values[i] > 127 ? 1 : 0);
    }
  });
});

describe("threshold slider", () => {
  it("re-thresholds the cached map with zero network requests", async () => {
    const server = new FakeSegmentServer();
    const { wb } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "red circle";
    await wb.submit();
    const callsAfterSubmit = server.calls.segment;
    const before = Array.from(wb.result!.maskBits);
    let changed = false;
    for (const t of [0.05, 0.2, 0.35, 0.65, 0.8, 0.95]) {
      wb.setThreshold(t);
      expect(wb.result!.threshold).toBe(t);
      if (Array.from(wb.result!.maskBits).join() !== before.join()) changed = true;
    }
    expect(changed).toBe(true); // the slider actually does something
    expect(server.calls.segment).toBe(callsAfterSubmit); // zero new requests
    expect(server.calls.health + server.calls.recipes).toBe(0);
  });
});

describe("interpolation slider endpoints", () => {
  it("a=0 reproduces the pure-text result byte-identically", async () => {
    const server = new FakeSegmentServer();
    const { wb, client } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "red circle";
    paintSupport(wb);
    expect(wb.hasBothModalities).toBe(true);
    wb.a = 0;
    await wb.submit();
    expect(wb.result!.entry.kind).toBe("interpolated");

    // oracle: direct /segment call with only the text prompt
    const direct = await client.segment({
      image: queryImage(),
      text: "red circle",
      threshold: 0.5,
    });
    expect(bytesEqual(wb.result!.serverMaskPng, direct.maskPng)).toBe(true);
  });

  it("a=1 reproduces the pure-visual result byte-identically", async () => {
    const server = new FakeSegmentServer();
    const { wb, client } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "red circle";
    paintSupport(wb);
    wb.a = 1;
    await wb.submit();

    const direct = await client.segment({
      image: queryImage(),
      supportImage: supportImage(),
      supportMask: await encodeMask(wb.painter!.mask, 16, 16),
      recipe: "best",
      threshold: 0.5,
    });
    expect(bytesEqual(wb.result!.serverMaskPng, direct.maskPng)).toBe(true);
  });
});

describe("error handling", () => {
  it("service unreachable -> network error banner state, retry recovers", async () => {
    const server = new FakeSegmentServer({ offline: true });
    const { wb } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "red circle";
    await wb.submit();
    expect(wb.error?.kind).toBe("network");
    expect(wb.result).toBeNull();

    (server as unknown as { options: { offline: boolean } })["options"].offline = false;
    await wb.retry();
    expect(wb.error).toBeNull();
    expect(wb.result).not.toBeNull();
  });

  it("4xx -> inline field error", async () => {
    const server = new FakeSegmentServer();
    const { wb } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "   "; // whitespace only: server sees no prompt
    await wb.submit();
    expect(wb.error?.kind).toBe("field");
    expect(wb.error?.message).toContain("prompt");
  });
});

describe("history", () => {
  it("stores parameters, re-runs entries, compares two prompts", async () => {
    const server = new FakeSegmentServer();
    const { wb } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "red circle";
    await wb.submit();
    wb.prompt = "blue square";
    wb.setThreshold(0.3);
    await wb.submit();
    expect(wb.history.length).toBe(2);
    expect(wb.history.get(0).prompt).toBe("red circle");

    await wb.rerun(0);
    expect(wb.prompt).toBe("red circle");
    expect(wb.result!.entry.prompt).toBe("red circle");

    const { left, right } = await wb.compare(0, 1);
    expect(left.entry.prompt).toBe("red circle");
    expect(right.entry.prompt).toBe("blue square");
    expect(bytesEqual(left.serverMaskPng, right.serverMaskPng)).toBe(false);
  });
});

describe("single in-flight request", () => {
  it("a newer submission supersedes the pending one without surfacing an error", async () => {
    const server = new FakeSegmentServer({ delayMs: 20 });
    const { wb } = makeWorkbench(server);
    wb.setImage(queryImage());
    wb.prompt = "first";
    const p1 = wb.submit();
    wb.prompt = "second";
    const p2 = wb.submit();
    await Promise.all([p1, p2]);
    expect(wb.error).toBeNull();
    expect(wb.result!.entry.prompt).toBe("second");
    expect(wb.history.length).toBe(1); // the aborted run records nothing
  });
});
