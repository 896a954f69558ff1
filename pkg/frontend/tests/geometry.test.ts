/** Lasso selection must match an independent point-in-polygon oracle. */

import { describe, expect, it } from "vitest";

import { Point, Viewport, boundsOf, lassoSelect, pointInPolygon } from "../src/geometry.js";

/** Independent oracle: winding-number via signed angle summation.
 *  Valid for simple polygons with query points off the boundary. */
function windingNumberInside(x: number, y: number, polygon: Point[]): boolean {
  let total = 0;
  for (let i = 0; i < polygon.length; i++) {
    const [x1, y1] = polygon[i];
    const [x2, y2] = polygon[(i + 1) % polygon.length];
    const a1 = Math.atan2(y1 - y, x1 - x);
    const a2 = Math.atan2(y2 - y, x2 - x);
    let delta = a2 - a1;
    while (delta > Math.PI) delta -= 2 * Math.PI;
    while (delta < -Math.PI) delta += 2 * Math.PI;
    total += delta;
  }
  return Math.abs(total) > Math.PI; // ~2π inside, ~0 outside
}

function grid(): { paper_id: number; x: number; y: number }[] {
  const points = [];
  let id = 0;
  for (let gx = 0; gx < 10; gx++) {
    for (let gy = 0; gy < 10; gy++) {
      points.push({ paper_id: id++, x: gx + 0.5, y: gy + 0.5 });
    }
  }
  return points;
}

const POLYGONS: Record<string, Point[]> = {
  rectangle: [[2.1, 2.1], [7.9, 2.1], [7.9, 6.9], [2.1, 6.9]],
  triangle: [[0.2, 0.2], [9.8, 0.2], [5.0, 9.8]],
  concave_l_shape: [[1.1, 1.1], [8.9, 1.1], [8.9, 4.1], [4.1, 4.1], [4.1, 8.9], [1.1, 8.9]],
  star_like: [[5, 9.7], [6.2, 6.2], [9.7, 6.2], [6.9, 4.0], [8.1, 0.4], [5, 2.7], [1.9, 0.4], [3.1, 4.0], [0.3, 6.2], [3.8, 6.2]],
};

describe("lasso selection vs point-in-polygon oracle", () => {
  for (const [name, polygon] of Object.entries(POLYGONS)) {
    it(`matches the winding-number oracle on a 10x10 grid: ${name}`, () => {
      const points = grid();
      const selected = new Set(lassoSelect(points, polygon));
      for (const point of points) {
        expect(selected.has(point.paper_id), `point ${point.paper_id} (${point.x},${point.y})`).toBe(
          windingNumberInside(point.x, point.y, polygon),
        );
      }
    });
  }

  it("selects nothing for degenerate polygons", () => {
    expect(lassoSelect(grid(), [])).toEqual([]);
    expect(lassoSelect(grid(), [[1, 1], [2, 2]])).toEqual([]);
  });

  it("counts boundary points as inside", () => {
    expect(pointInPolygon(2, 0, [[0, 0], [4, 0], [4, 4], [0, 4]])).toBe(true);
    expect(pointInPolygon(0, 0, [[0, 0], [4, 0], [4, 4], [0, 4]])).toBe(true);
  });
});

describe("viewport", () => {
  it("fit centers the bounds and round-trips coordinates", () => {
    const viewport = new Viewport(800, 600);
    viewport.fit({ minX: -2, maxX: 6, minY: 1, maxY: 5 });
    const [cx, cy] = viewport.toScreen(2, 3); // bounds center
    expect(cx).toBeCloseTo(400, 6);
    expect(cy).toBeCloseTo(300, 6);
    const [dx, dy] = viewport.toData(123, 456);
    const [px, py] = viewport.toScreen(dx, dy);
    expect(px).toBeCloseTo(123, 9);
    expect(py).toBeCloseTo(456, 9);
  });

  it("zoomAt keeps the anchor point fixed", () => {
    const viewport = new Viewport(800, 600);
    viewport.fit({ minX: 0, maxX: 10, minY: 0, maxY: 10 });
    const anchorData = viewport.toData(200, 150);
    viewport.zoomAt(200, 150, 1.7);
    const [px, py] = viewport.toScreen(anchorData[0], anchorData[1]);
    expect(px).toBeCloseTo(200, 6);
    expect(py).toBeCloseTo(150, 6);
  });

  it("boundsOf handles empty input", () => {
    expect(boundsOf([])).toBeNull();
    expect(boundsOf([{ x: 1, y: 2 }])).toEqual({ minX: 1, maxX: 1, minY: 2, maxY: 2 });
  });
});
