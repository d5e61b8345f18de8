// Results playback state: per-frame label overlays, key-frame admission
// markers, and the object legend built from the registry dump. Frames not
// yet completed by the tracker show as pending.

import type { ApiClient, ManifestWire, ResultFrame } from "./api";
import { composeOverlays, colorCss, type RgbaImage } from "./palette";
import { decodeWireMask } from "./rle";

export interface LegendEntry {
  id: number;
  color: string;
  birthFrame: number;
  provenance: string;
  active: boolean;
}

export interface FrameView {
  frame: number;
  overlay: RgbaImage;
  objectIds: number[];
}

export class ResultsPlayer {
  total = 0;
  completed = new Set<number>();
  current = 0;
  markers = new Set<number>(); // key frames where admissions happened
  legend: LegendEntry[] = [];
  private cache = new Map<number, FrameView>();

  constructor(
    private api: ApiClient,
    readonly sessionId: string,
    private width: number,
    private height: number,
  ) {}

  status(frame: number): "ready" | "pending" {
    return this.completed.has(frame) ? "ready" : "pending";
  }

  onFrameEvent(data: { frame: number; admitted?: number[] }): void {
    this.completed.add(data.frame);
    if (data.admitted && data.admitted.length > 0) {
      this.markers.add(data.frame);
    }
  }

  applyManifest(manifest: ManifestWire): void {
    this.total = manifest.frames;
    this.legend = Object.entries(manifest.registry).map(([id, e]) => ({
      id: Number(id),
      color: colorCss(Number(id)),
      birthFrame: e.birth_frame,
      provenance: e.provenance,
      active: e.active,
    }));
    this.markers = new Set(
      manifest.cmr_log.filter((rec) => rec.admitted.length > 0).map((rec) => rec.frame),
    );
  }

  async load(frame: number): Promise<FrameView> {
    const cached = this.cache.get(frame);
    if (cached) return cached;
    const result: ResultFrame = await this.api.result(this.sessionId, frame);
    const layers = result.objects.map((o) => ({
      mask: decodeWireMask(o.mask),
      objectId: o.id,
    }));
    const view: FrameView = {
      frame,
      overlay: composeOverlays(this.width, this.height, layers),
      objectIds: result.objects.map((o) => o.id),
    };
    this.cache.set(frame, view);
    this.completed.add(frame);
    return view;
  }

  async seek(frame: number): Promise<FrameView | "pending"> {
    if (frame < 0 || (this.total > 0 && frame >= this.total)) {
      throw new Error(`frame ${frame} out of range`);
    }
    this.current = frame;
    if (!this.completed.has(frame)) {
      try {
        return await this.load(frame);
      } catch {
        return "pending";
      }
    }
    return this.load(frame);
  }

  async scrubAll(): Promise<FrameView[]> {
    const views: FrameView[] = [];
    for (let f = 0; f < this.total; f++) {
      const v = await this.seek(f);
      if (v === "pending") {
        throw new Error(`frame ${f} still pending`);
      }
      views.push(v);
    }
    return views;
  }
}
