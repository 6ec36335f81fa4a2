// Top-down 2D projection of the scene: floor outline, the 3x3 placement
// grid, and labeled object footprints drawn to scale in insertion order.
//
// World axes: +x rightward, -z toward the viewer.  Screen y grows downward,
// so the front of the floor is the bottom edge of the drawing.

import { SceneView } from './api.js';

export interface Surface {
  clear(width: number, height: number): void;
  floorRect(x: number, y: number, w: number, h: number): void;
  gridLine(x1: number, y1: number, x2: number, y2: number): void;
  objectRect(x: number, y: number, w: number, h: number): void;
  label(text: string, x: number, y: number): void;
}

const MARGIN = 12;

export function renderScene(
  view: SceneView,
  surface: Surface,
  widthPx: number,
  heightPx: number,
): void {
  const floorW = view.floor.width_x;
  const floorD = view.floor.depth_z;
  const scale = Math.min(
    (widthPx - 2 * MARGIN) / floorW,
    (heightPx - 2 * MARGIN) / floorD,
  );
  const originX = (widthPx - floorW * scale) / 2;
  const originY = (heightPx - floorD * scale) / 2;

  const toPxX = (x: number) => originX + (x + floorW / 2) * scale;
  // -z (front) maps to the bottom edge
  const toPxY = (z: number) => originY + (floorD / 2 - z) * scale;

  surface.clear(widthPx, heightPx);
  surface.floorRect(toPxX(-floorW / 2), toPxY(floorD / 2), floorW * scale, floorD * scale);

  // cell boundaries between the three columns and three rows
  for (const x of [-floorW / 6, floorW / 6]) {
    surface.gridLine(toPxX(x), toPxY(floorD / 2), toPxX(x), toPxY(-floorD / 2));
  }
  for (const z of [-floorD / 6, floorD / 6]) {
    surface.gridLine(toPxX(-floorW / 2), toPxY(z), toPxX(floorW / 2), toPxY(z));
  }

  // insertion order doubles as z-order
  for (const obj of view.objects) {
    const left = toPxX(obj.center.x - obj.extents.half_width_x);
    const top = toPxY(obj.center.z + obj.extents.half_depth_z);
    const w = obj.extents.half_width_x * 2 * scale;
    const h = obj.extents.half_depth_z * 2 * scale;
    surface.objectRect(left, top, w, h);
    surface.label(obj.ref_name, toPxX(obj.center.x), toPxY(obj.center.z));
  }
}
