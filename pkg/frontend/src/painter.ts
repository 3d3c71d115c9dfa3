// Brush-based binary mask painting at the uploaded image's resolution.
// Edits are hard-binary: a pixel is either in the mask or not.

export class MaskPainter {
  readonly width: number;
  readonly height: number;
  readonly mask: Uint8Array;

  constructor(width: number, height: number) {
    if (width < 1 || height < 1) throw new Error(`bad painter size ${width}x${height}`);
    this.width = width;
    this.height = height;
    this.mask = new Uint8Array(width * height);
  }

  brush(cx: number, cy: number, radius: number, erase = false): void {
    const value = erase ? 0 : 1;
    const r2 = radius * radius;
    const x0 = Math.max(0, Math.floor(cx - radius));
    const x1 = Math.min(this.width - 1, Math.ceil(cx + radius));
    const y0 = Math.max(0, Math.floor(cy - radius));
    const y1 = Math.min(this.height - 1, Math.ceil(cy + radius));
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const dx = x - cx;
        const dy = y - cy;
        if (dx * dx + dy * dy <= r2) this.mask[y * this.width + x] = value;
      }
    }
  }

  /** Stamp circles along the segment so fast drags leave no gaps. */
  stroke(x0: number, y0: number, x1: number, y1: number, radius: number, erase = false): void {
    const steps = Math.max(1, Math.ceil(Math.hypot(x1 - x0, y1 - y0) / Math.max(1, radius / 2)));
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      this.brush(x0 + t * (x1 - x0), y0 + t * (y1 - y0), radius, erase);
    }
  }

  clear(): void {
    this.mask.fill(0);
  }

  isEmpty(): boolean {
    return !this.mask.some((v) => v !== 0);
  }

  pixelCount(): number {
    let n = 0;
    for (const v of this.mask) n += v;
    return n;
  }
}
