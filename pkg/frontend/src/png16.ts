// Minimal decoder for the service's 16-bit grayscale PNGs.
//
// Canvas decoding would clamp the probability map to 8 bits, losing the
// precision that makes client-side re-thresholding bit-identical to the
// server, so the scanlines are unfiltered by hand here.

export interface Gray16Image {
  width: number;
  height: number;
  /** row-major samples, one uint16 per pixel */
  values: Uint16Array;
}

const PNG_SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

function readU32(bytes: Uint8Array, offset: number): number {
  return (
    ((bytes[offset] << 24) | (bytes[offset + 1] << 16) | (bytes[offset + 2] << 8) | bytes[offset + 3]) >>> 0
  );
}

async function inflate(zlibData: Uint8Array): Promise<Uint8Array> {
  // PNG IDAT carries a zlib stream; "deflate" is the zlib-wrapped format
  const stream = new Blob([zlibData as BlobPart]).stream().pipeThrough(new DecompressionStream("deflate"));
  const buffer = await new Response(stream).arrayBuffer();
  return new Uint8Array(buffer);
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

/** Undo per-row PNG filters in place; bpp = bytes per pixel. */
function unfilter(raw: Uint8Array, width: number, height: number, bpp: number): Uint8Array {
  const stride = width * bpp;
  const out = new Uint8Array(stride * height);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)];
    const rowIn = y * (stride + 1) + 1;
    const rowOut = y * stride;
    for (let x = 0; x < stride; x++) {
      const value = raw[rowIn + x];
      const left = x >= bpp ? out[rowOut + x - bpp] : 0;
      const up = y > 0 ? out[rowOut - stride + x] : 0;
      const upLeft = y > 0 && x >= bpp ? out[rowOut - stride + x - bpp] : 0;
      let reconstructed: number;
      switch (filter) {
        case 0:
          reconstructed = value;
          break;
        case 1:
          reconstructed = value + left;
          break;
        case 2:
          reconstructed = value + up;
          break;
        case 3:
          reconstructed = value + ((left + up) >> 1);
          break;
        case 4:
          reconstructed = value + paeth(left, up, upLeft);
          break;
        default:
          throw new Error(`unsupported PNG filter type ${filter} in row ${y}`);
      }
      out[rowOut + x] = reconstructed & 0xff;
    }
  }
  return out;
}

export async function decodeGray16Png(bytes: Uint8Array): Promise<Gray16Image> {
  for (let i = 0; i < PNG_SIGNATURE.length; i++) {
    if (bytes[i] !== PNG_SIGNATURE[i]) throw new Error("not a PNG file");
  }
  let width = 0;
  let height = 0;
  let sawHeader = false;
  const idatParts: Uint8Array[] = [];
  let offset = 8;
  while (offset < bytes.length) {
    const length = readU32(bytes, offset);
    const type = String.fromCharCode(...bytes.subarray(offset + 4, offset + 8));
    const data = bytes.subarray(offset + 8, offset + 8 + length);
    if (type === "IHDR") {
      width = readU32(data, 0);
      height = readU32(data, 4);
      const [bitDepth, colorType, , , interlace] = [data[8], data[9], data[10], data[11], data[12]];
      if (bitDepth !== 16 || colorType !== 0) {
        throw new Error(`expected 16-bit grayscale, got depth ${bitDepth} color type ${colorType}`);
      }
      if (interlace !== 0) throw new Error("interlaced PNGs are not supported");
      sawHeader = true;
    } else if (type === "IDAT") {
      idatParts.push(data);
    } else if (type === "IEND") {
      break;
    }
    offset += 12 + length; // length + type + data + crc
  }
  if (!sawHeader || idatParts.length === 0) throw new Error("truncated PNG");

  const zlibData = new Uint8Array(idatParts.reduce((n, p) => n + p.length, 0));
  let at = 0;
  for (const part of idatParts) {
    zlibData.set(part, at);
    at += part.length;
  }
  const raw = await inflate(zlibData);
  const expected = height * (width * 2 + 1);
  if (raw.length < expected) {
    throw new Error(`inflated data too short: ${raw.length} < ${expected}`);
  }
  const unfiltered = unfilter(raw, width, height, 2);
  const values = new Uint16Array(width * height);
  for (let i = 0; i < values.length; i++) {
    values[i] = (unfiltered[2 * i] << 8) | unfiltered[2 * i + 1]; // big endian
  }
  return { width, height, values };
}

/** 8-bit grayscale variant (the service's binary mask PNGs, 0/255). */
export async function decodeGray8Png(bytes: Uint8Array): Promise<{ width: number; height: number; values: Uint8Array }> {
  for (let i = 0; i < PNG_SIGNATURE.length; i++) {
    if (bytes[i] !== PNG_SIGNATURE[i]) throw new Error("not a PNG file");
  }
  let width = 0;
  let height = 0;
  const idatParts: Uint8Array[] = [];
  let offset = 8;
  while (offset < bytes.length) {
    const length = readU32(bytes, offset);
    const type = String.fromCharCode(...bytes.subarray(offset + 4, offset + 8));
    const data = bytes.subarray(offset + 8, offset + 8 + length);
    if (type === "IHDR") {
      width = readU32(data, 0);
      height = readU32(data, 4);
      if (data[8] !== 8 || data[9] !== 0) {
        throw new Error(`expected 8-bit grayscale, got depth ${data[8]} color type ${data[9]}`);
      }
    } else if (type === "IDAT") {
      idatParts.push(data);
    } else if (type === "IEND") {
      break;
    }
    offset += 12 + length;
  }
  const zlibData = new Uint8Array(idatParts.reduce((n, p) => n + p.length, 0));
  let at = 0;
  for (const part of idatParts) {
    zlibData.set(part, at);
    at += part.length;
  }
  const raw = await inflate(zlibData);
  return { width, height, values: unfilter(raw, width, height, 1) };
}
