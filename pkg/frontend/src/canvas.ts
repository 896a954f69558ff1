/** Scatterplot of the 2-D projection: zoom, pan, hover, click select,
 *  shift-lasso, re-center, and focus-on-subset after a search. */

import { Bounds, Point, Viewport, boundsOf, lassoSelect } from "./geometry.js";
import { ProjectionPoint } from "./types.js";

const POINT_RADIUS = 3;
const HOVER_RADIUS = 8;

export interface CanvasHandlers {
  onHover(id: number | null): void;
  onToggleSelect(id: number): void;
  onLasso(ids: number[]): void;
}

export class ScatterCanvas {
  private ctx: CanvasRenderingContext2D;
  private viewport: Viewport;
  private points: ProjectionPoint[] = [];
  private colors: string[] = [];
  private selected = new Set<number>();
  private highlighted: number | null = null;
  private hovered: number | null = null;
  private lasso: Point[] | null = null;
  private dragging = false;
  private moved = false;
  private last: Point = [0, 0];

  constructor(
    private canvas: HTMLCanvasElement,
    private handlers: CanvasHandlers,
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
    this.viewport = new Viewport(canvas.width, canvas.height);
    canvas.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });
    canvas.addEventListener("mousedown", (e) => this.onDown(e));
    canvas.addEventListener("mousemove", (e) => this.onMove(e));
    window.addEventListener("mouseup", (e) => this.onUp(e));
    canvas.addEventListener("mouseleave", () => {
      this.hovered = null;
      this.handlers.onHover(null);
      this.render();
    });
  }

  setData(points: ProjectionPoint[], colors: string[], keepViewport = false): void {
    this.points = points;
    this.colors = colors;
    if (!keepViewport) this.recenter();
    else this.render();
  }

  setSelected(ids: Iterable<number>): void {
    this.selected = new Set(ids);
    this.render();
  }

  recenter(): void {
    const bounds = boundsOf(this.points);
    if (bounds) this.viewport.fit(bounds);
    this.render();
  }

  /** Auto-fit the viewport to a subset (seed + output points after a search). */
  focus(ids: number[]): void {
    const wanted = new Set(ids);
    const subset = this.points.filter((p) => wanted.has(p.paper_id));
    const bounds = boundsOf(subset);
    if (bounds) {
      this.viewport.fit(this.padBounds(bounds));
      this.render();
    }
  }

  /** Pan/zoom to one paper and highlight it (the table's locate action). */
  locate(id: number): void {
    const point = this.points.find((p) => p.paper_id === id);
    if (!point) return;
    this.viewport.fit(this.padBounds({ minX: point.x, maxX: point.x, minY: point.y, maxY: point.y }));
    this.viewport.scale = Math.min(this.viewport.scale, 80);
    this.highlighted = id;
    const [cx, cy] = [point.x, point.y];
    this.viewport.tx = this.viewport.width / 2 - cx * this.viewport.scale;
    this.viewport.ty = this.viewport.height / 2 + cy * this.viewport.scale;
    this.render();
  }

  private padBounds(b: Bounds): Bounds {
    const pad = Math.max((b.maxX - b.minX) * 0.15, (b.maxY - b.minY) * 0.15, 0.5);
    return { minX: b.minX - pad, maxX: b.maxX + pad, minY: b.minY - pad, maxY: b.maxY + pad };
  }

  private canvasXY(e: MouseEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    return [e.clientX - rect.left, e.clientY - rect.top];
  }

  private onWheel(e: WheelEvent): void {
    e.preventDefault();
    const [px, py] = this.canvasXY(e);
    this.viewport.zoomAt(px, py, e.deltaY < 0 ? 1.2 : 1 / 1.2);
    this.render();
  }

  private onDown(e: MouseEvent): void {
    this.dragging = true;
    this.moved = false;
    this.last = this.canvasXY(e);
    if (e.shiftKey) {
      const [px, py] = this.last;
      this.lasso = [this.viewport.toData(px, py)];
    }
  }

  private onMove(e: MouseEvent): void {
    const [px, py] = this.canvasXY(e);
    if (this.dragging && this.lasso) {
      this.lasso.push(this.viewport.toData(px, py));
      this.moved = true;
      this.render();
      return;
    }
    if (this.dragging) {
      this.viewport.pan(px - this.last[0], py - this.last[1]);
      this.last = [px, py];
      this.moved = true;
      this.render();
      return;
    }
    const hit = this.nearestPoint(px, py);
    if (hit !== this.hovered) {
      this.hovered = hit;
      this.handlers.onHover(hit);
      this.render();
    }
  }

  private onUp(e: MouseEvent): void {
    if (!this.dragging) return;
    this.dragging = false;
    if (this.lasso) {
      if (this.lasso.length >= 3) {
        this.handlers.onLasso(lassoSelect(this.points, this.lasso));
      }
      this.lasso = null;
      this.render();
      return;
    }
    if (!this.moved) {
      const [px, py] = this.canvasXY(e);
      const hit = this.nearestPoint(px, py);
      if (hit !== null) this.handlers.onToggleSelect(hit);
    }
  }

  private nearestPoint(px: number, py: number): number | null {
    let best: number | null = null;
    let bestD2 = HOVER_RADIUS * HOVER_RADIUS;
    for (const point of this.points) {
      const [sx, sy] = this.viewport.toScreen(point.x, point.y);
      const d2 = (sx - px) * (sx - px) + (sy - py) * (sy - py);
      if (d2 <= bestD2) {
        bestD2 = d2;
        best = point.paper_id;
      }
    }
    return best;
  }

  render(): void {
    const { width, height } = this.canvas;
    this.ctx.clearRect(0, 0, width, height);
    this.ctx.fillStyle = "#ffffff";
    this.ctx.fillRect(0, 0, width, height);
    for (let i = 0; i < this.points.length; i++) {
      const point = this.points[i];
      const [sx, sy] = this.viewport.toScreen(point.x, point.y);
      if (sx < -10 || sy < -10 || sx > width + 10 || sy > height + 10) continue;
      this.ctx.beginPath();
      this.ctx.arc(sx, sy, POINT_RADIUS, 0, 2 * Math.PI);
      this.ctx.fillStyle = this.colors[i];
      this.ctx.fill();
      if (this.selected.has(point.paper_id) || this.highlighted === point.paper_id || this.hovered === point.paper_id) {
        this.ctx.beginPath();
        this.ctx.arc(sx, sy, POINT_RADIUS + 2.5, 0, 2 * Math.PI);
        this.ctx.strokeStyle = this.highlighted === point.paper_id ? "#e03131" : "#1c7ed6";
        this.ctx.lineWidth = 2;
        this.ctx.stroke();
      }
    }
    if (this.lasso && this.lasso.length > 1) {
      this.ctx.beginPath();
      const [x0, y0] = this.viewport.toScreen(this.lasso[0][0], this.lasso[0][1]);
      this.ctx.moveTo(x0, y0);
      for (const [x, y] of this.lasso.slice(1)) {
        const [sx, sy] = this.viewport.toScreen(x, y);
        this.ctx.lineTo(sx, sy);
      }
      this.ctx.closePath();
      this.ctx.strokeStyle = "#1c7ed6";
      this.ctx.setLineDash([4, 3]);
      this.ctx.lineWidth = 1.5;
      this.ctx.stroke();
      this.ctx.setLineDash([]);
    }
  }
}
