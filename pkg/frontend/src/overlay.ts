// Mask overlay pixels. The overlay canvas has the exact image resolution
// and is scaled together with the image canvas by CSS, which keeps the two
// pixel-aligned at every zoom level.

export interface OverlayStyle {
  color: [number, number, number];
  opacity: number; // 0..1
}

export const DEFAULT_STYLE: OverlayStyle = { color: [255, 60, 40], opacity: 0.5 };

/** RGBA buffer for a standalone overlay layer (transparent off-mask). */
export function overlayPixels(
  mask: Uint8Array,
  width: number,
  height: number,
  style: OverlayStyle = DEFAULT_STYLE,
): Uint8ClampedArray {
  if (mask.length !== width * height) {
    throw new Error(`mask length ${mask.length} != ${width}x${height}`);
  }
  const out = new Uint8ClampedArray(width * height * 4);
  const alpha = Math.round(255 * Math.min(1, Math.max(0, style.opacity)));
  for (let i = 0; i < mask.length; i++) {
    if (mask[i]) {
      const j = i * 4;
      out[j] = style.color[0];
      out[j + 1] = style.color[1];
      out[j + 2] = style.color[2];
      out[j + 3] = alpha;
    }
  }
  return out;
}

/** Alpha-composite the overlay onto a copy of the base RGBA image. */
export function composeOverlay(
  base: Uint8ClampedArray,
  mask: Uint8Array,
  style: OverlayStyle = DEFAULT_STYLE,
): Uint8ClampedArray {
  if (base.length !== mask.length * 4) {
    throw new Error(`base RGBA length ${base.length} != 4 * mask length ${mask.length}`);
  }
  const out = new Uint8ClampedArray(base);
  const a = Math.min(1, Math.max(0, style.opacity));
  for (let i = 0; i < mask.length; i++) {
    if (mask[i]) {
      const j = i * 4;
      out[j] = Math.round(a * style.color[0] + (1 - a) * base[j]);
      out[j + 1] = Math.round(a * style.color[1] + (1 - a) * base[j + 1]);
      out[j + 2] = Math.round(a * style.color[2] + (1 - a) * base[j + 2]);
    }
  }
  return out;
}
