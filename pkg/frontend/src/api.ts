// REST client for the segmentation service. The workbench allows one
// in-flight segmentation: a newer submission aborts the pending one.

export interface SegmentParams {
  image: Blob;
  text?: string;
  supportImage?: Blob;
  supportMask?: Blob;
  recipe?: string;
  threshold?: number;
  a?: number;
}

export interface SegmentResult {
  maskPng: Uint8Array;
  probMapPng: Uint8Array;
  threshold: number;
  latencyMs: number;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service returned ${status}: ${JSON.stringify(detail)}`);
  }
}

export function base64ToBytes(b64: string): Uint8Array {
  const binary = atob(b64);
  const out = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) out[i] = binary.charCodeAt(i);
  return out;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SegmentClient {
  private inflight: AbortController | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async health(): Promise<{ status: string; model_hash: string }> {
    const res = await this.fetchFn(`${this.baseUrl}/health`);
    if (!res.ok) throw new ServiceError(res.status, await res.text());
    return res.json();
  }

  async recipes(): Promise<string[]> {
    const res = await this.fetchFn(`${this.baseUrl}/recipes`);
    if (!res.ok) throw new ServiceError(res.status, await res.text());
    return (await res.json()).recipes;
  }

  /** POST /segment; aborts any still-pending segmentation first. */
  async segment(params: SegmentParams): Promise<SegmentResult> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;

    const form = new FormData();
    form.append("image", params.image, "query.png");
    if (params.text !== undefined) form.append("text", params.text);
    if (params.supportImage && params.supportMask) {
      form.append("support_image", params.supportImage, "support.png");
      form.append("support_mask", params.supportMask, "support_mask.png");
    }
    if (params.recipe !== undefined) form.append("recipe", params.recipe);
    if (params.threshold !== undefined) form.append("threshold", String(params.threshold));
    if (params.a !== undefined) form.append("a", String(params.a));

    let res: Response;
    try {
      res = await this.fetchFn(`${this.baseUrl}/segment`, {
        method: "POST",
        body: form,
        signal: controller.signal,
      });
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
    if (!res.ok) {
      let detail: unknown;
      try {
        detail = (await res.json()).detail;
      } catch {
        detail = await res.text();
      }
      throw new ServiceError(res.status, detail);
    }
    const body = await res.json();
    return {
      maskPng: base64ToBytes(body.mask_png_base64),
      probMapPng: base64ToBytes(body.prob_map_png_base64),
      threshold: body.threshold,
      latencyMs: body.latency_ms,
    };
  }
}
