import { describe, expect, it } from "vitest";

import { SegmentClient, ServiceError } from "../src/api.js";
import { FakeSegmentServer } from "./helpers.js";

const queryImage = () => new Blob([new Uint8Array([1, 2, 3, 4])], { type: "image/png" });

describe("SegmentClient", () => {
  it("fetches health and recipes", async () => {
    const server = new FakeSegmentServer();
    const client = new SegmentClient("http://fake", server.fetch);
    expect((await client.health()).status).toBe("ok");
    expect(await client.recipes()).toContain("best");
  });

  it("segments with a text prompt and decodes the payload", async () => {
    const server = new FakeSegmentServer();
    const client = new SegmentClient("http://fake", server.fetch);
    const result = await client.segment({ image: queryImage(), text: "red circle" });
    expect(result.threshold).toBe(0.5);
    expect(result.maskPng.length).toBeGreaterThan(8);
    expect(result.probMapPng.length).toBeGreaterThan(8);
    expect(server.calls.segment).toBe(1);
  });

  it("raises ServiceError with the server detail on 4xx", async () => {
    const server = new FakeSegmentServer();
    const client = new SegmentClient("http://fake", server.fetch);
    try {
      await client.segment({ image: queryImage() }); // no prompt at all
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ServiceError);
      expect((err as ServiceError).status).toBe(422);
      expect(String((err as ServiceError).detail)).toContain("prompt");
    }
  });

  it("aborts the pending request when a newer one is submitted", async () => {
    const server = new FakeSegmentServer({ delayMs: 30 });
    const client = new SegmentClient("http://fake", server.fetch);
    const first = client.segment({ image: queryImage(), text: "one" });
    const second = client.segment({ image: queryImage(), text: "two" });
    await expect(first).rejects.toThrow(/abort/i);
    const result = await second;
    expect(result.threshold).toBe(0.5);
    expect(server.calls.segment).toBe(2);
  });
});
