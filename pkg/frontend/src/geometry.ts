/** Lasso selection, bounding boxes, and the canvas viewport transform. */

export type Point = [number, number];

export interface Bounds {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

/** Even-odd rule via ray casting; boundary points count as inside. */
export function pointInPolygon(x: number, y: number, polygon: Point[]): boolean {
  const n = polygon.length;
  if (n < 3) return false;
  let inside = false;
  for (let i = 0, j = n - 1; i < n; j = i++) {
    const [xi, yi] = polygon[i];
    const [xj, yj] = polygon[j];
    // on-segment check keeps boundary points selected
    const cross = (x - xi) * (yj - yi) - (y - yi) * (xj - xi);
    if (
      cross === 0 &&
      Math.min(xi, xj) <= x && x <= Math.max(xi, xj) &&
      Math.min(yi, yj) <= y && y <= Math.max(yi, yj)
    ) {
      return true;
    }
    if (yi > y !== yj > y) {
      const xCross = ((xj - xi) * (y - yi)) / (yj - yi) + xi;
      if (x < xCross) inside = !inside;
    }
  }
  return inside;
}

export function lassoSelect(
  points: { paper_id: number; x: number; y: number }[],
  polygon: Point[],
): number[] {
  return points.filter((p) => pointInPolygon(p.x, p.y, polygon)).map((p) => p.paper_id);
}

export function boundsOf(points: { x: number; y: number }[]): Bounds | null {
  if (points.length === 0) return null;
  let minX = Infinity,
    maxX = -Infinity,
    minY = Infinity,
    maxY = -Infinity;
  for (const p of points) {
    if (p.x < minX) minX = p.x;
    if (p.x > maxX) maxX = p.x;
    if (p.y < minY) minY = p.y;
    if (p.y > maxY) maxY = p.y;
  }
  return { minX, maxX, minY, maxY };
}

/** Data -> screen mapping with uniform scale (y flipped, data up = screen up). */
export class Viewport {
  scale = 1;
  tx = 0;
  ty = 0;

  constructor(
    public width: number,
    public height: number,
  ) {}

  /** Fit bounds into the viewport with padding; the re-center control. */
  fit(bounds: Bounds, padding = 24): void {
    const spanX = Math.max(bounds.maxX - bounds.minX, 1e-9);
    const spanY = Math.max(bounds.maxY - bounds.minY, 1e-9);
    this.scale = Math.min(
      (this.width - 2 * padding) / spanX,
      (this.height - 2 * padding) / spanY,
    );
    const cx = (bounds.minX + bounds.maxX) / 2;
    const cy = (bounds.minY + bounds.maxY) / 2;
    this.tx = this.width / 2 - cx * this.scale;
    this.ty = this.height / 2 + cy * this.scale;
  }

  toScreen(x: number, y: number): Point {
    return [x * this.scale + this.tx, -y * this.scale + this.ty];
  }

  toData(px: number, py: number): Point {
    return [(px - this.tx) / this.scale, -(py - this.ty) / this.scale];
  }

  /** Zoom by `factor` keeping the data point under (px, py) fixed. */
  zoomAt(px: number, py: number, factor: number): void {
    const [dx, dy] = this.toData(px, py);
    this.scale *= factor;
    this.tx = px - dx * this.scale;
    this.ty = py + dy * this.scale;
  }

  pan(dpx: number, dpy: number): void {
    this.tx += dpx;
    this.ty += dpy;
  }
}
