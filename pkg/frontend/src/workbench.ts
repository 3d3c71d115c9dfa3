// Workbench state machine: everything the UI does minus the DOM.
//
// Cached 16-bit probability map makes the threshold slider free (zero
// network requests); re-runs and comparisons replay history parameters
// through the service.

import { SegmentClient, SegmentParams, ServiceError } from "./api.js";
import { HistoryEntry, PromptHistory } from "./history.js";
import { OverlayStyle, DEFAULT_STYLE, overlayPixels } from "./overlay.js";
import { MaskPainter } from "./painter.js";
import { decodeGray16Png } from "./png16.js";
import { rethreshold } from "./threshold.js";

export interface SegmentationView {
  width: number;
  height: number;
  prob16: Uint16Array;
  maskBits: Uint8Array;
  /** raw server mask PNG, kept for byte-level comparisons */
  serverMaskPng: Uint8Array;
  threshold: number;
  entry: HistoryEntry;
}

export type WorkbenchError =
  | { kind: "network"; message: string }
  | { kind: "field"; message: string };

export interface WorkbenchDeps {
  client: SegmentClient;
  /** binary mask -> PNG blob; canvas-based in the browser, pure in tests */
  encodeMask: (mask: Uint8Array, width: number, height: number) => Promise<Blob>;
}

export class Workbench {
  prompt = "";
  recipe = "best";
  a = 0.5;
  threshold = 0.5;
  style: OverlayStyle = { ...DEFAULT_STYLE };
  image: Blob | null = null;
  supportImage: Blob | null = null;
  painter: MaskPainter | null = null;
  result: SegmentationView | null = null;
  error: WorkbenchError | null = null;
  busy = false;
  readonly history = new PromptHistory();
  private listeners: Array<() => void> = [];

  constructor(private readonly deps: WorkbenchDeps) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  setImage(blob: Blob): void {
    this.image = blob;
    this.result = null;
    this.notify();
  }

  setSupport(blob: Blob | null, width = 0, height = 0): void {
    this.supportImage = blob;
    // painting happens at the uploaded support image's own resolution
    this.painter = blob ? new MaskPainter(width, height) : null;
    this.notify();
  }

  get hasBothModalities(): boolean {
    return this.prompt.trim() !== "" && this.supportImage !== null && this.painter !== null && !this.painter.isEmpty();
  }

  private currentEntry(): HistoryEntry {
    const hasText = this.prompt.trim() !== "";
    const hasVisual = this.supportImage !== null && this.painter !== null && !this.painter.isEmpty();
    const kind = hasText && hasVisual ? "interpolated" : hasVisual ? "visual" : "text";
    return {
      kind,
      prompt: this.prompt,
      threshold: this.threshold,
      recipe: this.recipe,
      a: kind === "interpolated" ? this.a : null,
    };
  }

  private async paramsFor(entry: HistoryEntry): Promise<SegmentParams> {
    if (!this.image) throw new Error("no query image uploaded");
    const params: SegmentParams = { image: this.image, threshold: entry.threshold };
    if (entry.kind !== "visual") params.text = entry.prompt;
    if (entry.kind !== "text") {
      if (!this.supportImage || !this.painter) throw new Error("no support pair painted");
      params.supportImage = this.supportImage;
      params.supportMask = await this.deps.encodeMask(
        this.painter.mask,
        this.painter.width,
        this.painter.height,
      );
      params.recipe = entry.recipe;
    }
    if (entry.kind === "interpolated" && entry.a !== null) params.a = entry.a;
    return params;
  }

  /** Submit the current prompt; a newer submit aborts the pending one. */
  async submit(): Promise<void> {
    await this.run(this.currentEntry());
  }

  private async run(entry: HistoryEntry): Promise<void> {
    this.busy = true;
    this.error = null;
    this.notify();
    try {
      const result = await this.deps.client.segment(await this.paramsFor(entry));
      const prob = await decodeGray16Png(result.probMapPng);
      this.result = {
        width: prob.width,
        height: prob.height,
        prob16: prob.values,
        maskBits: rethreshold(prob.values, entry.threshold),
        serverMaskPng: result.maskPng,
        threshold: entry.threshold,
        entry,
      };
      this.history.push(entry);
    } catch (err) {
      if ((err as Error).name === "AbortError") return; // superseded
      if (err instanceof ServiceError && err.status >= 400 && err.status < 500) {
        this.error = { kind: "field", message: String(err.detail ?? err.message) };
      } else {
        this.error = { kind: "network", message: (err as Error).message };
      }
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /** Retry after a network failure (banner button). */
  async retry(): Promise<void> {
    await this.submit();
  }

  /** Re-threshold the cached probability map; no network involved. */
  setThreshold(t: number): void {
    this.threshold = t;
    if (this.result) {
      this.result = {
        ...this.result,
        threshold: t,
        maskBits: rethreshold(this.result.prob16, t),
      };
    }
    this.notify();
  }

  setOpacity(opacity: number): void {
    this.style = { ...this.style, opacity };
    this.notify();
  }

  /** RGBA pixels for the overlay layer at image resolution. */
  overlay(): Uint8ClampedArray | null {
    if (!this.result) return null;
    return overlayPixels(this.result.maskBits, this.result.width, this.result.height, this.style);
  }

  /** One-click re-run of a history entry. */
  async rerun(index: number): Promise<void> {
    const entry = this.history.get(index);
    this.prompt = entry.prompt;
    this.recipe = entry.recipe;
    this.threshold = entry.threshold;
    if (entry.a !== null) this.a = entry.a;
    await this.run(entry);
  }

  /** Side-by-side comparison: replay two history entries sequentially. */
  async compare(i: number, j: number): Promise<{ left: SegmentationView; right: SegmentationView }> {
    const views: SegmentationView[] = [];
    for (const index of [i, j]) {
      const entry = this.history.get(index);
      const result = await this.deps.client.segment(await this.paramsFor(entry));
      const prob = await decodeGray16Png(result.probMapPng);
      views.push({
        width: prob.width,
        height: prob.height,
        prob16: prob.values,
        maskBits: rethreshold(prob.values, entry.threshold),
        serverMaskPng: result.maskPng,
        threshold: entry.threshold,
        entry,
      });
    }
    return { left: views[0], right: views[1] };
  }
}
