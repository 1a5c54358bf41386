// Application wiring: image picker, canvas mouse handling, server round-trips.
// The server is the single source of truth for labels; after every mutation
// the overlay re-renders from the response, and a failed request rolls back
// to the last known server state and shows the error banner.

import { ApiError, LabelClient, LabelMap, LineSegment } from "./api.js";
import { renderOverlay } from "./overlay.js";
import { ViewState, beginDrag, endDrag, hitTestLine, initialState, toImageCoords, updateDrag } from "./state.js";

export interface AppElements {
  canvas: HTMLCanvasElement;
  picker: HTMLSelectElement;
  banner: HTMLElement;
  modeLabel: HTMLElement;
}

export type ImageLoader = (url: string) => Promise<CanvasImageSource | null>;

export class LabelApp {
  state: ViewState = initialState();
  lines: LineSegment[] = [];
  labels: LabelMap = {};
  image: CanvasImageSource | null = null;
  private inFlight = false;

  constructor(
    private client: LabelClient,
    private ui: AppElements,
    private imageLoader: ImageLoader = defaultImageLoader,
  ) {}

  async start(): Promise<void> {
    const images = await this.guard(() => this.client.listImages());
    if (!images) return;
    this.ui.picker.innerHTML = "";
    for (const info of images) {
      const option = document.createElement("option");
      option.value = info.id;
      option.textContent = `${info.id} (${info.line_count} lines)`;
      this.ui.picker.appendChild(option);
    }
    if (images.length) {
      await this.selectImage(images[0].id, images[0].width, images[0].height);
    }
    this.bindEvents(images);
  }

  private bindEvents(images: { id: string; width: number; height: number }[]): void {
    this.ui.picker.addEventListener("change", () => {
      const info = images.find((i) => i.id === this.ui.picker.value);
      if (info) void this.selectImage(info.id, info.width, info.height);
    });
    this.ui.canvas.addEventListener("mousedown", (ev) => this.onMouseDown(ev));
    this.ui.canvas.addEventListener("mousemove", (ev) => this.onMouseMove(ev));
    this.ui.canvas.addEventListener("mouseup", (ev) => void this.onMouseUp(ev));
    window.addEventListener("keydown", (ev) => {
      if (ev.key === "d") this.toggleDeselectMode();
      if (ev.key === "l") { this.state.showLines = !this.state.showLines; this.render(); }
    });
  }

  async selectImage(imageId: string, width: number, height: number): Promise<void> {
    this.state.imageId = imageId;
    this.state.imageWidth = width;
    this.state.imageHeight = height;
    const lines = await this.guard(() => this.client.fetchLines(imageId));
    const labels = await this.guard(() => this.client.fetchLabels(imageId));
    if (!lines || !labels) return;
    this.lines = lines;
    this.labels = labels;
    this.image = await this.imageLoader(this.client.rawImageUrl(imageId));
    this.render();
  }

  toggleDeselectMode(): void {
    this.state.deselectMode = !this.state.deselectMode;
    this.ui.modeLabel.textContent = this.state.deselectMode
      ? "deselect mode (d to leave)"
      : "region mode (d for deselect)";
  }

  private canvasPoint(ev: MouseEvent) {
    const rect = this.ui.canvas.getBoundingClientRect();
    return toImageCoords(this.state, ev.clientX - rect.left, ev.clientY - rect.top);
  }

  onMouseDown(ev: MouseEvent): void {
    if (this.state.deselectMode || !this.state.imageId) return;
    const p = this.canvasPoint(ev);
    beginDrag(this.state, p.x, p.y);
    this.render();
  }

  onMouseMove(ev: MouseEvent): void {
    if (!this.state.drag) return;
    const p = this.canvasPoint(ev);
    updateDrag(this.state, p.x, p.y);
    this.render();
  }

  async onMouseUp(ev: MouseEvent): Promise<void> {
    const imageId = this.state.imageId;
    if (!imageId) return;
    if (this.state.deselectMode) {
      const p = this.canvasPoint(ev);
      const hit = hitTestLine(this.lines, p.x, p.y);
      if (hit !== null) await this.submitDeselect(imageId, hit);
      return;
    }
    const rect = endDrag(this.state);
    this.render();
    if (!rect) return; // zero-area click sends nothing
    await this.submitRegion(imageId, rect);
  }

  async submitRegion(imageId: string, rect: { x: number; y: number; width: number; height: number }): Promise<void> {
    if (this.inFlight) return; // de-duplicate in-flight requests
    this.inFlight = true;
    const before = this.labels;
    try {
      this.labels = await this.client.submitRegion(imageId, rect);
      this.clearBanner();
    } catch (err) {
      this.labels = before; // rollback to the last server truth
      this.showBanner(err);
    } finally {
      this.inFlight = false;
      this.render();
    }
  }

  async submitDeselect(imageId: string, lineId: number): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    const before = this.labels;
    try {
      this.labels = await this.client.deselect(imageId, lineId);
      this.clearBanner();
    } catch (err) {
      this.labels = before;
      this.showBanner(err);
    } finally {
      this.inFlight = false;
      this.render();
    }
  }

  private showBanner(err: unknown): void {
    const detail = err instanceof ApiError ? `server rejected the request (${err.status})`
      : "could not reach the labeling service";
    this.ui.banner.textContent = detail;
    this.ui.banner.style.display = "block";
  }

  private clearBanner(): void {
    this.ui.banner.textContent = "";
    this.ui.banner.style.display = "none";
  }

  private async guard<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      const out = await call();
      this.clearBanner();
      return out;
    } catch (err) {
      this.showBanner(err);
      return null;
    }
  }

  render() {
    const ctx = this.ui.canvas.getContext("2d");
    if (!ctx) return null;
    return renderOverlay(ctx, this.state, this.image, this.lines, this.labels);
  }
}

/** Load the raw image, giving up after a short timeout so a dead endpoint
 * cannot wedge the page (the overlay then renders lines on a blank canvas). */
export function defaultImageLoader(url: string): Promise<CanvasImageSource | null> {
  return new Promise((resolve) => {
    if (typeof Image === "undefined") return resolve(null);
    const img = new Image();
    const timer = setTimeout(() => resolve(null), 3000);
    img.onload = () => { clearTimeout(timer); resolve(img); };
    img.onerror = () => { clearTimeout(timer); resolve(null); };
    img.src = url;
  });
}

export function mount(root: Document = document): LabelApp {
  const canvas = root.getElementById("scene") as HTMLCanvasElement;
  const picker = root.getElementById("picker") as HTMLSelectElement;
  const banner = root.getElementById("banner") as HTMLElement;
  const modeLabel = root.getElementById("mode") as HTMLElement;
  const app = new LabelApp(new LabelClient(""), { canvas, picker, banner, modeLabel });
  void app.start();
  return app;
}
