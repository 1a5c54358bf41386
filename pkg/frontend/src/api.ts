// Typed client for the labeling service HTTP+JSON API.
// Every mutation goes through these calls; the UI never computes labels.

export type LineSegment = [number, number, number, number];

export type LabelValue = "fracture" | "non-fracture";

export type LabelMap = Record<string, LabelValue>;

export interface ImageInfo {
  id: string;
  width: number;
  height: number;
  line_count: number;
}

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class LabelClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, `${path} failed with ${resp.status}`);
    }
    return resp;
  }

  async listImages(): Promise<ImageInfo[]> {
    return (await this.request("/images")).json();
  }

  rawImageUrl(imageId: string): string {
    return `${this.baseUrl}/images/${imageId}/raw`;
  }

  async fetchLines(imageId: string): Promise<LineSegment[]> {
    return (await this.request(`/images/${imageId}/lines`)).json();
  }

  async fetchLabels(imageId: string): Promise<LabelMap> {
    const body = await (await this.request(`/images/${imageId}/labels`)).json();
    return body.labels as LabelMap;
  }

  async submitRegion(imageId: string, rect: Rect, author = ""): Promise<LabelMap> {
    const body = await (
      await this.request(`/images/${imageId}/regions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ ...rect, author }),
      })
    ).json();
    return body.labels as LabelMap;
  }

  async deselect(imageId: string, lineId: number): Promise<LabelMap> {
    const body = await (
      await this.request(`/images/${imageId}/deselect`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ line_id: lineId }),
      })
    ).json();
    return body.labels as LabelMap;
  }

  async exportCsv(): Promise<string> {
    return (await this.request("/export.csv")).text();
  }
}
