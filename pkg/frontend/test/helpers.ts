// Test utilities: minimal PNG encoders (filter 0 + zlib via
// CompressionStream) and a deterministic fake of the segmentation
// service's REST contract.

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < bytes.length; i++) c = CRC_TABLE[(c ^ bytes[i]) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function u32be(value: number): Uint8Array {
  return new Uint8Array([(value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff]);
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const typeBytes = new TextEncoder().encode(type);
  const body = new Uint8Array(typeBytes.length + data.length);
  body.set(typeBytes);
  body.set(data, typeBytes.length);
  const out = new Uint8Array(4 + body.length + 4);
  out.set(u32be(data.length));
  out.set(body, 4);
  out.set(u32be(crc32(body)), 4 + body.length);
  return out;
}

async function deflate(data: Uint8Array): Promise<Uint8Array> {
  const stream = new Blob([data as BlobPart]).stream().pipeThrough(new CompressionStream("deflate"));
  return new Uint8Array(await new Response(stream).arrayBuffer());
}

function concat(parts: Uint8Array[]): Uint8Array {
  const out = new Uint8Array(parts.reduce((n, p) => n + p.length, 0));
  let at = 0;
  for (const p of parts) {
    out.set(p, at);
    at += p.length;
  }
  return out;
}

const SIGNATURE = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

export async function encodeGray16Png(values: Uint16Array, width: number, height: number): Promise<Uint8Array> {
  const ihdr = concat([u32be(width), u32be(height), new Uint8Array([16, 0, 0, 0, 0])]);
  const raw = new Uint8Array(height * (width * 2 + 1));
  for (let y = 0; y < height; y++) {
    const row = y * (width * 2 + 1);
    raw[row] = 0; // filter: none
    for (let x = 0; x < width; x++) {
      const v = values[y * width + x];
      raw[row + 1 + 2 * x] = (v >> 8) & 0xff;
      raw[row + 2 + 2 * x] = v & 0xff;
    }
  }
  return concat([SIGNATURE, chunk("IHDR", ihdr), chunk("IDAT", await deflate(raw)), chunk("IEND", new Uint8Array(0))]);
}

export async function encodeGray8Png(values: Uint8Array, width: number, height: number): Promise<Uint8Array> {
  const ihdr = concat([u32be(width), u32be(height), new Uint8Array([8, 0, 0, 0, 0])]);
  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    const row = y * (width + 1);
    raw[row] = 0;
    raw.set(values.subarray(y * width, (y + 1) * width), row + 1);
  }
  return concat([SIGNATURE, chunk("IHDR", ihdr), chunk("IDAT", await deflate(raw)), chunk("IEND", new Uint8Array(0))]);
}

export function bytesToBase64(bytes: Uint8Array): string {
  let binary = "";
  for (let i = 0; i < bytes.length; i += 4096) {
    binary += String.fromCharCode(...bytes.subarray(i, i + 4096));
  }
  return btoa(binary);
}

// ------------------------------------------------------------ fake server

function fnv1a(data: Uint8Array | string): number {
  const bytes = typeof data === "string" ? new TextEncoder().encode(data) : data;
  let h = 0x811c9dc5;
  for (let i = 0; i < bytes.length; i++) {
    h ^= bytes[i];
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function seededField(seed: number, n: number): Float64Array {
  const rand = mulberry32(seed);
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) out[i] = rand();
  return out;
}

export interface FakeServerOptions {
  width?: number;
  height?: number;
  /** when set, every request fails as if the network were down */
  offline?: boolean;
  /** artificial response delay in ms (for cancellation tests) */
  delayMs?: number;
}

/**
 * Deterministic stand-in for the segmentation service, implementing the
 * documented REST contract: probability maps derive from hashes of the
 * prompt inputs, interpolation is linear in "embedding" space, the mask
 * is thresholded from the same quantized values the client receives.
 */
export class FakeSegmentServer {
  calls = { health: 0, recipes: 0, segment: 0 };
  readonly width: number;
  readonly height: number;
  private readonly options: FakeServerOptions;

  constructor(options: FakeServerOptions = {}) {
    this.options = options;
    this.width = options.width ?? 16;
    this.height = options.height ?? 16;
  }

  fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    if (this.options.offline) throw new TypeError("fetch failed: connection refused");
    const url = new URL(input);
    // count on arrival, like a real server, even if the caller aborts
    if (url.pathname === "/health") this.calls.health++;
    else if (url.pathname === "/recipes") this.calls.recipes++;
    else if (url.pathname === "/segment") this.calls.segment++;
    if (this.options.delayMs) {
      await new Promise((resolve, reject) => {
        const timer = setTimeout(resolve, this.options.delayMs);
        init?.signal?.addEventListener("abort", () => {
          clearTimeout(timer);
          reject(new DOMException("aborted", "AbortError"));
        });
      });
    }
    if (url.pathname === "/health") {
      return Response.json({ status: "ok", model_hash: "fake-hash" });
    }
    if (url.pathname === "/recipes") {
      return Response.json({ recipes: ["best", "crop", "original"] });
    }
    if (url.pathname === "/segment") {
      return this.segment(init?.body as FormData);
    }
    return Response.json({ detail: "not found" }, { status: 404 });
  };

  private async segment(form: FormData): Promise<Response> {
    const image = form.get("image") as Blob | null;
    if (!image) {
      return Response.json({ detail: { field: "image", problem: "missing" } }, { status: 400 });
    }
    const text = form.get("text") as string | null;
    const supportImage = form.get("support_image") as Blob | null;
    const supportMask = form.get("support_mask") as Blob | null;
    const hasText = text !== null && text.trim() !== "";
    const hasSupport = supportImage !== null && supportMask !== null;
    if (!hasText && !hasSupport) {
      return Response.json({ detail: "prompt missing" }, { status: 422 });
    }
    const recipe = (form.get("recipe") as string | null) ?? "best";
    const t = Number(form.get("threshold") ?? 0.5);
    const aRaw = form.get("a");
    const a = aRaw === null ? 0.5 : Number(aRaw);

    const n = this.width * this.height;
    const imageSeed = fnv1a(new Uint8Array(await image.arrayBuffer()));
    let probs: Float64Array;
    if (hasText && hasSupport) {
      const textField = seededField(imageSeed ^ fnv1a(text!), n);
      const visSeed =
        imageSeed ^
        fnv1a(new Uint8Array(await supportImage!.arrayBuffer())) ^
        fnv1a(new Uint8Array(await supportMask!.arrayBuffer())) ^
        fnv1a(recipe);
      const visField = seededField(visSeed, n);
      probs = new Float64Array(n);
      // endpoints reproduce the pure-modality fields exactly
      for (let i = 0; i < n; i++) probs[i] = a * visField[i] + (1 - a) * textField[i];
    } else if (hasText) {
      probs = seededField(imageSeed ^ fnv1a(text!), n);
    } else {
      const visSeed =
        imageSeed ^
        fnv1a(new Uint8Array(await supportImage!.arrayBuffer())) ^
        fnv1a(new Uint8Array(await supportMask!.arrayBuffer())) ^
        fnv1a(recipe);
      probs = seededField(visSeed, n);
    }

    const quantized = new Uint16Array(n);
    const maskPixels = new Uint8Array(n);
    for (let i = 0; i < n; i++) {
      quantized[i] = Math.round(probs[i] * 65535);
      maskPixels[i] = quantized[i] / 65535 >= t ? 255 : 0;
    }
    const probPng = await encodeGray16Png(quantized, this.width, this.height);
    const maskPng = await encodeGray8Png(maskPixels, this.width, this.height);
    return Response.json({
      mask_png_base64: bytesToBase64(maskPng),
      prob_map_png_base64: bytesToBase64(probPng),
      threshold: t,
      latency_ms: 1.0,
    });
  }
}

export function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) if (a[i] !== b[i]) return false;
  return true;
}
