import { describe, expect, it } from 'vitest';

import { renderScene } from '../src/render.js';
import { RecordingSurface, sceneView } from './fakes.js';

const SIZE = 640;

describe('renderScene', () => {
  it('draws the floor, four grid lines, and one labeled rect per object', () => {
    const surface = new RecordingSurface();
    renderScene(sceneView(2, ['Yaskawa MA2010', 'ABB IRB 2600']), surface, SIZE, SIZE);

    expect(surface.floorRects).toHaveLength(1);
    expect(surface.gridLines).toHaveLength(4);
    expect(surface.objectRects).toHaveLength(2);
    expect(surface.labels.map((l) => l.text)).toEqual(['Yaskawa MA2010', 'ABB IRB 2600']);
  });

  it('places grid lines on the third boundaries of the floor', () => {
    const surface = new RecordingSurface();
    const view = sceneView(0, []);
    renderScene(view, surface, SIZE, SIZE);

    const [fx, fy, fw, fh] = surface.floorRects[0];
    const verticals = surface.gridLines.filter(([x1, , x2]) => x1 === x2).map(([x1]) => x1);
    const horizontals = surface.gridLines.filter(([, y1, , y2]) => y1 === y2).map(([, y1]) => y1);
    expect(verticals.sort((a, b) => a - b)).toEqual([fx + fw / 3, fx + (2 * fw) / 3]);
    expect(horizontals.sort((a, b) => a - b)).toEqual([fy + fh / 3, fy + (2 * fh) / 3]);
  });

  it('draws footprints to scale at the projected position', () => {
    const surface = new RecordingSurface();
    const view = sceneView(1, []);
    view.objects.push({
      ref_name: 'Yaskawa MA2010',
      prototype: 'Yaskawa MA2010',
      center: { x: 10, y: 1, z: -10 }, // front-right cell of the 30x30 floor
      extents: { half_width_x: 1, half_depth_z: 1, height_y: 2 },
    });
    renderScene(view, surface, SIZE, SIZE);

    const [fx, fy, fw, fh] = surface.floorRects[0];
    const scale = fw / 30;
    const [x, y, w, h] = surface.objectRects[0];
    expect(w).toBeCloseTo(2 * scale);
    expect(h).toBeCloseTo(2 * scale);
    // x = +10 is right of center; z = -10 (front) is the lower band
    expect(x).toBeCloseTo(fx + (10 - 1 + 15) * scale);
    expect(y).toBeCloseTo(fy + (15 - (-10 + 1)) * scale);
    expect(y + h / 2).toBeGreaterThan(fy + fh / 2); // drawn in the bottom half
  });

  it('is deterministic for a fixed view', () => {
    const a = new RecordingSurface();
    const b = new RecordingSurface();
    const view = sceneView(3, ['x', 'y', 'z']);
    renderScene(view, a, SIZE, SIZE);
    renderScene(view, b, SIZE, SIZE);
    expect(a).toEqual(b);
  });
});
