// Canvas rendering with an inspectable display list. Under a real browser
// the RGBA buffers land on the 2D context; under test environments without
// a canvas backend the display list alone carries what would be on screen.

import type { RgbaImage } from "./palette";

export class OverlayView {
  readonly rendered = new Map<string, RgbaImage>();
  private ctx: CanvasRenderingContext2D | null;

  constructor(private canvas: HTMLCanvasElement) {
    this.ctx = canvas.getContext ? canvas.getContext("2d") : null;
  }

  resize(width: number, height: number): void {
    this.canvas.width = width;
    this.canvas.height = height;
  }

  private toImageData(image: RgbaImage): ImageData {
    // copy into a fresh buffer: ImageData requires a non-shared ArrayBuffer
    const copy = new Uint8ClampedArray(image.data.length);
    copy.set(image.data);
    return new ImageData(copy, image.width, image.height);
  }

  draw(layer: string, image: RgbaImage): void {
    this.rendered.set(layer, image);
    if (this.ctx) {
      this.ctx.putImageData(this.toImageData(image), 0, 0);
    }
  }

  clear(layer: string): void {
    this.rendered.delete(layer);
    if (this.ctx) {
      this.ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
      for (const img of this.rendered.values()) {
        this.ctx.putImageData(this.toImageData(img), 0, 0);
      }
    }
  }

  layers(): string[] {
    return [...this.rendered.keys()];
  }
}
