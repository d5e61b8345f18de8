// Annotation-phase state. Staged previews mirror the server exactly: a stage
// exists here only once the service acknowledged the prompt and returned its
// preview mask.

import type { ApiClient, PromptWire, StagedWire } from "./api";
import type { Point } from "./coords";
import { sampleStroke, uniquePixels } from "./stroke";

export type Tool = "click+" | "click-" | "box" | "text";

export interface Stage {
  index: number;
  mask: number[]; // wire RLE
  provenance: string;
}

export class Annotator {
  tool: Tool = "click+";
  stages: Stage[] = [];
  committed = false;

  constructor(
    private api: ApiClient,
    readonly sessionId: string,
  ) {}

  private absorb(staged: StagedWire[]): Stage[] {
    const fresh = staged.map((s) => ({
      index: s.index,
      mask: s.mask,
      provenance: s.provenance,
    }));
    this.stages.push(...fresh);
    return fresh;
  }

  private ensureOpen() {
    if (this.committed) {
      throw new Error("reference already committed");
    }
  }

  async clickAt(pixel: Point, polarity: "positive" | "negative" = "positive"): Promise<Stage[]> {
    this.ensureOpen();
    const prompt: PromptWire = { type: "point", x: pixel.x, y: pixel.y, polarity };
    const resp = await this.api.addPrompt(this.sessionId, prompt);
    return this.absorb(resp.staged);
  }

  async boxAt(xMin: number, yMin: number, xMax: number, yMax: number): Promise<Stage[]> {
    this.ensureOpen();
    const prompt: PromptWire = {
      type: "box",
      box: { x_min: xMin, y_min: yMin, x_max: xMax, y_max: yMax },
    };
    const resp = await this.api.addPrompt(this.sessionId, prompt);
    return this.absorb(resp.staged);
  }

  async textPrompt(phrase: string, scoreThreshold = 0.5): Promise<Stage[]> {
    this.ensureOpen();
    const resp = await this.api.addPrompt(this.sessionId, {
      type: "text",
      phrase,
      score_threshold: scoreThreshold,
    });
    return this.absorb(resp.staged);
  }

  /** A stroke becomes positive clicks sampled every 8 px along the polyline
   * (the prompt contract only knows points and boxes); each acknowledged
   * click stages a preview, and duplicates can be revoked like any stage. */
  async strokeAt(path: Point[]): Promise<Stage[]> {
    this.ensureOpen();
    const pixels = uniquePixels(sampleStroke(path));
    const fresh: Stage[] = [];
    for (const p of pixels) {
      const resp = await this.api.addPrompt(this.sessionId, {
        type: "point",
        x: p.x,
        y: p.y,
        polarity: "positive",
      });
      fresh.push(...this.absorb(resp.staged));
    }
    return fresh;
  }

  async revoke(k: number): Promise<void> {
    this.ensureOpen();
    await this.api.revokePrompt(this.sessionId, k);
    this.stages.splice(k, 1);
    this.stages.forEach((s, i) => (s.index = i));
  }

  async commit(): Promise<{ id: number; area: number }[]> {
    this.ensureOpen();
    const resp = await this.api.commit(this.sessionId);
    this.committed = true;
    return resp.objects;
  }
}
