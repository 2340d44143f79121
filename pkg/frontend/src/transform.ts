/** View transform between screen (canvas) coordinates and image pixels.
 *
 * Image pixel (i, j) occupies the unit square [i, i+1) x [j, j+1) in image
 * space; zoom is uniform, pan is a screen-space offset. screenToImagePixel is
 * the exact inverse of the forward transform followed by floor, so a click on
 * the same feature yields the same pixel at any zoom level.
 */

export interface Point {
  x: number;
  y: number;
}

export class ViewTransform {
  scale = 1;
  offsetX = 0;
  offsetY = 0;

  constructor(
    public minScale = 0.05,
    public maxScale = 32,
  ) {}

  imageToScreen(p: Point): Point {
    return { x: p.x * this.scale + this.offsetX, y: p.y * this.scale + this.offsetY };
  }

  screenToImage(p: Point): Point {
    return { x: (p.x - this.offsetX) / this.scale, y: (p.y - this.offsetY) / this.scale };
  }

  /** Integer image pixel under a screen point. */
  screenToImagePixel(p: Point): Point {
    const img = this.screenToImage(p);
    return { x: Math.floor(img.x), y: Math.floor(img.y) };
  }

  /** Zoom by factor keeping the image point under `screen` fixed. */
  zoomAt(screen: Point, factor: number): void {
    const anchor = this.screenToImage(screen);
    this.scale = Math.min(this.maxScale, Math.max(this.minScale, this.scale * factor));
    this.offsetX = screen.x - anchor.x * this.scale;
    this.offsetY = screen.y - anchor.y * this.scale;
  }

  panBy(dx: number, dy: number): void {
    this.offsetX += dx;
    this.offsetY += dy;
  }

  /** Center the image in a viewport at the largest whole fit. */
  fit(imageW: number, imageH: number, viewW: number, viewH: number): void {
    this.scale = Math.min(viewW / imageW, viewH / imageH);
    this.scale = Math.min(this.maxScale, Math.max(this.minScale, this.scale));
    this.offsetX = (viewW - imageW * this.scale) / 2;
    this.offsetY = (viewH - imageH * this.scale) / 2;
  }
}

export function clampPixelToImage(p: Point, width: number, height: number): Point {
  return {
    x: Math.min(width - 1, Math.max(0, p.x)),
    y: Math.min(height - 1, Math.max(0, p.y)),
  };
}
