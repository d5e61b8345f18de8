// Canvas <-> image coordinate mapping. The invariant the UI depends on:
// a canvas point maps to the image pixel under it, and rendering that pixel
// back (at its center) lands within 1 canvas px of the original point for
// any zoom <= 2.

export interface ViewTransform {
  zoom: number; // canvas px per image px
  offsetX: number;
  offsetY: number;
}

export interface Point {
  x: number;
  y: number;
}

export function fitTransform(
  imageW: number,
  imageH: number,
  canvasW: number,
  canvasH: number,
): ViewTransform {
  const zoom = Math.min(canvasW / imageW, canvasH / imageH);
  return {
    zoom,
    offsetX: (canvasW - imageW * zoom) / 2,
    offsetY: (canvasH - imageH * zoom) / 2,
  };
}

export function zoomedTransform(base: ViewTransform, zoom: number): ViewTransform {
  return { zoom, offsetX: base.offsetX, offsetY: base.offsetY };
}

/** Canvas point -> containing image pixel, or null when outside the image. */
export function canvasToImage(
  p: Point,
  t: ViewTransform,
  imageW: number,
  imageH: number,
): Point | null {
  const x = Math.floor((p.x - t.offsetX) / t.zoom);
  const y = Math.floor((p.y - t.offsetY) / t.zoom);
  if (x < 0 || y < 0 || x >= imageW || y >= imageH) {
    return null;
  }
  return { x, y };
}

/** Image pixel -> canvas position of the pixel's center. */
export function imageToCanvas(q: Point, t: ViewTransform): Point {
  return {
    x: (q.x + 0.5) * t.zoom + t.offsetX,
    y: (q.y + 0.5) * t.zoom + t.offsetY,
  };
}
