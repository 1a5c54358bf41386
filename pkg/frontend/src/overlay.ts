// Canvas overlay rendering: the image underneath, detected lines colored by
// their server-side labels, and the live rectangle preview.

import type { LabelMap, LineSegment } from "./api.js";
import type { ViewState } from "./state.js";

export const FRACTURE_COLOR = "#ff3b30";
export const NEUTRAL_COLOR = "#4da3ff";
export const PREVIEW_COLOR = "#ffd60a";

export interface Scene {
  drawnLines: number;
  highlighted: number[];
}

export function renderOverlay(
  ctx: CanvasRenderingContext2D,
  state: ViewState,
  image: CanvasImageSource | null,
  lines: LineSegment[],
  labels: LabelMap,
): Scene {
  const t = state.transform;
  ctx.save();
  ctx.clearRect(0, 0, Number.MAX_SAFE_INTEGER, Number.MAX_SAFE_INTEGER);
  ctx.setTransform(t.scale, 0, 0, t.scale, t.offsetX, t.offsetY);
  if (image) {
    ctx.drawImage(image, 0, 0);
  }
  const scene: Scene = { drawnLines: 0, highlighted: [] };
  if (state.showLines) {
    lines.forEach((line, index) => {
      const fractured = state.showLabels && labels[String(index)] === "fracture";
      ctx.beginPath();
      ctx.moveTo(line[0], line[1]);
      ctx.lineTo(line[2], line[3]);
      ctx.strokeStyle = fractured ? FRACTURE_COLOR : NEUTRAL_COLOR;
      ctx.lineWidth = fractured ? 2 : 1;
      ctx.stroke();
      scene.drawnLines += 1;
      if (fractured) scene.highlighted.push(index);
    });
  }
  if (state.drag) {
    const { startX, startY, endX, endY } = state.drag;
    ctx.strokeStyle = PREVIEW_COLOR;
    ctx.lineWidth = 1;
    ctx.strokeRect(Math.min(startX, endX), Math.min(startY, endY),
                   Math.abs(endX - startX), Math.abs(endY - startY));
  }
  ctx.restore();
  return scene;
}
