// In-memory stand-in for the labeling service, implementing the documented
// HTTP contract: endpoint-rule region labeling with union semantics,
// idempotent deselection, and CSV export with +/-1 targets.

import type { FetchLike, LabelValue, LineSegment, Rect } from "../src/api.js";

export interface MockImage {
  id: string;
  width: number;
  height: number;
  lines: LineSegment[];
}

export class MockServer {
  labels = new Map<string, Map<number, LabelValue>>();
  requests: string[] = [];

  constructor(public images: MockImage[]) {}

  private image(id: string): MockImage | undefined {
    return this.images.find((img) => img.id === id);
  }

  private ensure(id: string): Map<number, LabelValue> {
    if (!this.labels.has(id)) {
      const img = this.image(id)!;
      this.labels.set(id, new Map(img.lines.map((_, i) => [i, "non-fracture" as LabelValue])));
    }
    return this.labels.get(id)!;
  }

  private labelBody(id: string) {
    const map = this.ensure(id);
    const out: Record<string, LabelValue> = {};
    for (const [k, v] of map) out[String(k)] = v;
    return { labels: out };
  }

  applyRegion(id: string, rect: Rect): void {
    const img = this.image(id)!;
    const map = this.ensure(id);
    const inside = (x: number, y: number) =>
      x >= rect.x && x <= rect.x + rect.width && y >= rect.y && y <= rect.y + rect.height;
    img.lines.forEach(([x1, y1, x2, y2], i) => {
      if (inside(x1, y1) || inside(x2, y2)) map.set(i, "fracture");
    });
  }

  exportCsv(): string {
    const rows = ["image_id,line_id,target"];
    for (const img of this.images) {
      const map = this.ensure(img.id);
      img.lines.forEach((_, i) => {
        rows.push(`${img.id},${i},${map.get(i) === "fracture" ? 1 : -1}`);
      });
    }
    return rows.join("\n") + "\n";
  }

  fetch: FetchLike = async (url, init) => {
    this.requests.push(`${init?.method ?? "GET"} ${url}`);
    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), { status, headers: { "Content-Type": "application/json" } });

    if (url === "/images") {
      return json(this.images.map(({ id, width, height, lines }) => (
        { id, width, height, line_count: lines.length })));
    }
    let m = url.match(/^\/images\/([^/]+)\/lines$/);
    if (m) {
      const img = this.image(m[1]);
      return img ? json(img.lines) : json({ detail: "unknown image" }, 404);
    }
    m = url.match(/^\/images\/([^/]+)\/labels$/);
    if (m) {
      return this.image(m[1]) ? json(this.labelBody(m[1])) : json({}, 404);
    }
    m = url.match(/^\/images\/([^/]+)\/regions$/);
    if (m && init?.method === "POST") {
      const img = this.image(m[1]);
      if (!img) return json({}, 404);
      const rect = JSON.parse(String(init.body)) as Rect;
      if (rect.x < 0 || rect.y < 0 || rect.x + rect.width > img.width
          || rect.y + rect.height > img.height) {
        return json({ detail: "selection rectangle exceeds the image bounds" }, 400);
      }
      this.applyRegion(m[1], rect);
      return json(this.labelBody(m[1]));
    }
    m = url.match(/^\/images\/([^/]+)\/deselect$/);
    if (m && init?.method === "POST") {
      const img = this.image(m[1]);
      if (!img) return json({}, 404);
      const { line_id } = JSON.parse(String(init.body)) as { line_id: number };
      if (line_id < 0 || line_id >= img.lines.length) return json({}, 404);
      const map = this.ensure(m[1]);
      if (map.get(line_id) === "fracture") map.set(line_id, "non-fracture");
      return json(this.labelBody(m[1]));
    }
    if (url === "/export.csv") {
      return new Response(this.exportCsv(), { status: 200, headers: { "Content-Type": "text/csv" } });
    }
    return json({ detail: "not found" }, 404);
  };
}

export function demoServer(): MockServer {
  return new MockServer([
    {
      id: "demo",
      width: 128,
      height: 64,
      lines: [
        [10, 10, 30, 12],
        [40, 40, 60, 42],
        [5, 18, 28, 18],
      ],
    },
  ]);
}
