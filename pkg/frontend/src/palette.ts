// Deterministic object colors: the same bit-interleaved colormap the server
// uses for its indexed PNGs, so exported images and UI overlays agree.

import type { BinaryMask } from "./rle";

export function vocColor(index: number): [number, number, number] {
  let c = index & 0xff;
  let r = 0;
  let g = 0;
  let b = 0;
  for (let shift = 0; shift < 8; shift++) {
    r |= ((c >> 0) & 1) << (7 - shift);
    g |= ((c >> 1) & 1) << (7 - shift);
    b |= ((c >> 2) & 1) << (7 - shift);
    c >>= 3;
  }
  return [r, g, b];
}

export function colorCss(index: number): string {
  const [r, g, b] = vocColor(index);
  return `rgb(${r}, ${g}, ${b})`;
}

export interface RgbaImage {
  width: number;
  height: number;
  data: Uint8ClampedArray; // RGBA
}

export function maskOverlay(mask: BinaryMask, objectId: number, alpha = 160): RgbaImage {
  const [r, g, b] = vocColor(objectId);
  const data = new Uint8ClampedArray(mask.width * mask.height * 4);
  for (let i = 0; i < mask.data.length; i++) {
    if (mask.data[i]) {
      const o = i * 4;
      data[o] = r;
      data[o + 1] = g;
      data[o + 2] = b;
      data[o + 3] = alpha;
    }
  }
  return { width: mask.width, height: mask.height, data };
}

export function composeOverlays(
  width: number,
  height: number,
  layers: { mask: BinaryMask; objectId: number }[],
  alpha = 160,
): RgbaImage {
  const data = new Uint8ClampedArray(width * height * 4);
  for (const { mask, objectId } of layers) {
    const [r, g, b] = vocColor(objectId);
    for (let i = 0; i < mask.data.length; i++) {
      if (mask.data[i]) {
        const o = i * 4;
        data[o] = r;
        data[o + 1] = g;
        data[o + 2] = b;
        data[o + 3] = alpha;
      }
    }
  }
  return { width, height, data };
}
