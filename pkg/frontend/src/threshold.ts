// Client-side re-thresholding of the cached 16-bit probability map.
//
// The server thresholds the same quantized values, so this reproduces its
// masks bit for bit; against the un-quantized probabilities, disagreement
// is confined to the one-step quantization band around t.

export const PROB_SCALE = 65535;

/** One dequantization step: probabilities within this of t may flip. */
export const QUANTIZATION_BAND = 1 / PROB_SCALE;

export function rethreshold(prob: Uint16Array, t: number): Uint8Array {
  if (!(t > 0 && t < 1)) throw new Error(`threshold must be in (0, 1), got ${t}`);
  const out = new Uint8Array(prob.length);
  for (let i = 0; i < prob.length; i++) {
    out[i] = prob[i] / PROB_SCALE >= t ? 1 : 0;
  }
  return out;
}

export function withinQuantizationBand(probability: number, t: number): boolean {
  return Math.abs(probability - t) <= QUANTIZATION_BAND;
}
