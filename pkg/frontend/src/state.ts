// View state: exactly one active image, overlay toggles, an in-progress
// rectangle drag clamped to the image bounds, and the zoom/pan transform.

import type { Rect } from "./api.js";

export interface Transform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export interface ViewState {
  imageId: string | null;
  imageWidth: number;
  imageHeight: number;
  showLines: boolean;
  showLabels: boolean;
  showBounds: boolean;
  deselectMode: boolean;
  drag: { startX: number; startY: number; endX: number; endY: number } | null;
  transform: Transform;
}

export function initialState(): ViewState {
  return {
    imageId: null,
    imageWidth: 0,
    imageHeight: 0,
    showLines: true,
    showLabels: true,
    showBounds: false,
    deselectMode: false,
    drag: null,
    transform: { scale: 1, offsetX: 0, offsetY: 0 },
  };
}

export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(Math.max(value, lo), hi);
}

export function beginDrag(state: ViewState, x: number, y: number): void {
  const cx = clamp(x, 0, state.imageWidth - 1);
  const cy = clamp(y, 0, state.imageHeight - 1);
  state.drag = { startX: cx, startY: cy, endX: cx, endY: cy };
}

export function updateDrag(state: ViewState, x: number, y: number): void {
  if (!state.drag) return;
  state.drag.endX = clamp(x, 0, state.imageWidth - 1);
  state.drag.endY = clamp(y, 0, state.imageHeight - 1);
}

/** Finish the drag; returns the drawn rectangle or null for a zero-area click. */
export function endDrag(state: ViewState): Rect | null {
  const drag = state.drag;
  state.drag = null;
  if (!drag) return null;
  const x = Math.min(drag.startX, drag.endX);
  const y = Math.min(drag.startY, drag.endY);
  const width = Math.abs(drag.endX - drag.startX);
  const height = Math.abs(drag.endY - drag.startY);
  if (width < 1 || height < 1) return null;
  return { x: Math.round(x), y: Math.round(y), width: Math.round(width), height: Math.round(height) };
}

/** Map a canvas-space point into image coordinates under the current transform. */
export function toImageCoords(state: ViewState, canvasX: number, canvasY: number) {
  const t = state.transform;
  return { x: (canvasX - t.offsetX) / t.scale, y: (canvasY - t.offsetY) / t.scale };
}

/** Squared distance from a point to a segment, for click-to-line hit testing. */
export function segmentDistanceSq(
  px: number, py: number, x1: number, y1: number, x2: number, y2: number,
): number {
  const dx = x2 - x1;
  const dy = y2 - y1;
  const lengthSq = dx * dx + dy * dy;
  let t = lengthSq === 0 ? 0 : ((px - x1) * dx + (py - y1) * dy) / lengthSq;
  t = clamp(t, 0, 1);
  const qx = x1 + t * dx;
  const qy = y1 + t * dy;
  return (px - qx) ** 2 + (py - qy) ** 2;
}

/** Index of the line nearest to (x, y) within `radius` pixels, or null. */
export function hitTestLine(
  lines: [number, number, number, number][], x: number, y: number, radius = 4,
): number | null {
  let best: number | null = null;
  let bestDistance = radius * radius;
  lines.forEach(([x1, y1, x2, y2], index) => {
    const d = segmentDistanceSq(x, y, x1, y1, x2, y2);
    if (d <= bestDistance) {
      best = index;
      bestDistance = d;
    }
  });
  return best;
}
