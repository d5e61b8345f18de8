// Application wiring: one session per page, annotate on the reference frame,
// launch tracking, scrub results. All server state flows through ApiClient.

import { Annotator, type Tool } from "./annotator";
import { ApiClient, type SessionConfigWire } from "./api";
import { canvasToImage, fitTransform, type Point, type ViewTransform } from "./coords";
import { maskOverlay } from "./palette";
import { ResultsPlayer } from "./player";
import { decodeWireMask } from "./rle";
import { subscribeEvents, type Subscription } from "./sse";
import { OverlayView } from "./view";

export interface AppOptions {
  baseUrl: string;
  fetchImpl?: typeof fetch;
}

export class App {
  api: ApiClient;
  annotator: Annotator | null = null;
  player: ResultsPlayer | null = null;
  sessionId = "";
  imageW = 0;
  imageH = 0;
  transform: ViewTransform = { zoom: 1, offsetX: 0, offsetY: 0 };
  view: OverlayView;
  timeline: HTMLInputElement;
  statusEl: HTMLElement;
  legendEl: HTMLElement;
  markersEl: HTMLElement;
  stagesEl: HTMLElement;
  canvas: HTMLCanvasElement;
  tool: Tool = "click+";
  private events: Subscription | null = null;

  constructor(
    root: HTMLElement,
    private opts: AppOptions,
  ) {
    this.api = new ApiClient(opts.baseUrl, opts.fetchImpl);
    root.innerHTML = `
      <div class="toolbar">
        <button data-tool="click+">click +</button>
        <button data-tool="click-">click -</button>
        <button data-tool="box">box</button>
        <button data-tool="text">text</button>
        <input id="phrase" placeholder="text phrase" />
        <label>n <input id="interval" type="number" value="8" min="1" /></label>
        <label>t <input id="threshold" type="number" value="0.8" step="0.05" min="0" max="1" /></label>
        <select id="mode">
          <option value="interactive">interactive</option>
          <option value="fusion">fusion</option>
          <option value="automatic">automatic</option>
        </select>
        <button id="commit">commit</button>
        <button id="track">track</button>
      </div>
      <canvas id="frame" width="640" height="480"></canvas>
      <div id="stages"></div>
      <div class="player">
        <input id="timeline" type="range" min="0" max="0" value="0" />
        <div id="markers"></div>
        <div id="legend"></div>
        <div id="status"></div>
      </div>`;
    this.canvas = root.querySelector("#frame") as HTMLCanvasElement;
    this.timeline = root.querySelector("#timeline") as HTMLInputElement;
    this.statusEl = root.querySelector("#status") as HTMLElement;
    this.legendEl = root.querySelector("#legend") as HTMLElement;
    this.markersEl = root.querySelector("#markers") as HTMLElement;
    this.stagesEl = root.querySelector("#stages") as HTMLElement;
    this.view = new OverlayView(this.canvas);
    for (const btn of root.querySelectorAll<HTMLButtonElement>("[data-tool]")) {
      btn.addEventListener("click", () => {
        this.tool = btn.dataset.tool as Tool;
        if (this.annotator) this.annotator.tool = this.tool;
      });
    }
    (root.querySelector("#commit") as HTMLButtonElement).addEventListener("click", () => {
      void this.commit();
    });
    (root.querySelector("#track") as HTMLButtonElement).addEventListener("click", () => {
      void this.track();
    });
    this.canvas.addEventListener("click", (ev) => {
      void this.onCanvasClick(ev as MouseEvent);
    });
    this.timeline.addEventListener("input", () => {
      void this.showFrame(Number(this.timeline.value));
    });
  }

  async createSession(config: SessionConfigWire, video: Record<string, unknown> = {}) {
    const handle = await this.api.createSession(config);
    this.sessionId = handle.id;
    const info = await this.api.attachVideo(this.sessionId, video);
    const preview = decodePngSize(info.preview);
    this.imageW = preview.width;
    this.imageH = preview.height;
    this.transform = fitTransform(this.imageW, this.imageH, this.canvas.width, this.canvas.height);
    this.annotator = new Annotator(this.api, this.sessionId);
    this.annotator.tool = this.tool;
    this.player = new ResultsPlayer(this.api, this.sessionId, this.imageW, this.imageH);
    this.timeline.max = String(info.frames - 1);
    this.statusEl.textContent = `annotating (${info.frames} frames)`;
    return info;
  }

  async onCanvasClick(ev: MouseEvent): Promise<void> {
    if (!this.annotator || this.annotator.committed) return;
    const rect = this.canvas.getBoundingClientRect();
    const p: Point = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    const pixel = canvasToImage(p, this.transform, this.imageW, this.imageH);
    if (!pixel) return;
    if (this.tool === "click+" || this.tool === "click-") {
      const polarity = this.tool === "click+" ? "positive" : "negative";
      const stages = await this.annotator.clickAt(pixel, polarity);
      this.renderStages(stages);
    }
  }

  renderStages(stages: { index: number; mask: number[] }[]): void {
    for (const s of stages) {
      const mask = decodeWireMask(s.mask);
      this.view.draw(`stage-${s.index}`, maskOverlay(mask, s.index + 1));
      const row = (this.stagesEl.ownerDocument as Document).createElement("div");
      row.dataset.stage = String(s.index);
      row.textContent = `stage ${s.index}`;
      const revoke = (this.stagesEl.ownerDocument as Document).createElement("button");
      revoke.textContent = "revoke";
      revoke.addEventListener("click", () => void this.revokeStage(s.index));
      row.appendChild(revoke);
      this.stagesEl.appendChild(row);
    }
  }

  async revokeStage(k: number): Promise<void> {
    if (!this.annotator) return;
    await this.annotator.revoke(k);
    this.view.clear(`stage-${k}`);
    this.stagesEl.querySelector(`[data-stage="${k}"]`)?.remove();
  }

  async commit(): Promise<void> {
    if (!this.annotator) return;
    await this.annotator.commit();
    this.statusEl.textContent = "committed";
  }

  async track(): Promise<void> {
    if (!this.player) return;
    await this.api.track(this.sessionId);
    this.statusEl.textContent = "tracking";
    this.events = subscribeEvents(
      this.api.eventsUrl(this.sessionId),
      (ev) => {
        if (ev.name === "frame") {
          this.player!.onFrameEvent(ev.data as { frame: number; admitted?: number[] });
          this.statusEl.textContent = `tracking frame ${(ev.data as { frame: number }).frame}`;
        } else if (ev.name === "done") {
          this.statusEl.textContent = "done";
        } else if (ev.name === "failed") {
          this.statusEl.textContent = `failed: ${JSON.stringify(ev.data)}`;
        }
      },
      this.opts.fetchImpl ?? fetch,
    );
    await this.events.done;
    const manifest = await this.api.manifest(this.sessionId);
    this.player.applyManifest(manifest);
    this.renderLegendAndMarkers();
  }

  renderLegendAndMarkers(): void {
    if (!this.player) return;
    const doc = this.legendEl.ownerDocument as Document;
    this.legendEl.innerHTML = "";
    for (const entry of this.player.legend) {
      const el = doc.createElement("span");
      el.dataset.objectId = String(entry.id);
      el.textContent = `#${entry.id} (${entry.provenance}, frame ${entry.birthFrame})`;
      el.style.color = entry.color;
      this.legendEl.appendChild(el);
    }
    this.markersEl.innerHTML = "";
    for (const frame of [...this.player.markers].sort((a, b) => a - b)) {
      const el = doc.createElement("span");
      el.dataset.keyframe = String(frame);
      el.textContent = `+${frame}`;
      this.markersEl.appendChild(el);
    }
  }

  async showFrame(frame: number): Promise<void> {
    if (!this.player) return;
    const view = await this.player.seek(frame);
    if (view === "pending") {
      this.statusEl.textContent = `frame ${frame} pending`;
      return;
    }
    this.view.draw("result", view.overlay);
    this.statusEl.textContent = `frame ${frame}`;
  }
}

function decodePngSize(b64: string): { width: number; height: number } {
  // PNG IHDR: width/height are big-endian u32 at bytes 16..24
  const bin = typeof atob === "function" ? atob(b64) : Buffer.from(b64, "base64").toString("binary");
  const at = (i: number) => bin.charCodeAt(i);
  const width = (at(16) << 24) | (at(17) << 16) | (at(18) << 8) | at(19);
  const height = (at(20) << 24) | (at(21) << 16) | (at(22) << 8) | at(23);
  return { width, height };
}

export function mount(root: HTMLElement, opts: AppOptions): App {
  return new App(root, opts);
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== "undefined" && typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    mount(root, { baseUrl: "" });
  }
}
