/** Minimal deterministic SVG document builder (no DOM, no dependencies). */

const XMLNS = "http://www.w3.org/2000/svg";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** Fixed-precision coordinate formatting keeps output byte-stable. */
export function fmt(v: number): string {
  const s = v.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  /** Metadata block tying the figure to its inputs (file -> sha256). */
  metadata(entries: Record<string, string>): void {
    const lines = Object.keys(entries)
      .sort()
      .map((k) => `${esc(k)} sha256=${esc(entries[k])}`)
      .join("\n");
    this.parts.push(`<metadata id="inputs">\n${lines}\n</metadata>`);
  }

  polyline(pts: [number, number][], stroke: string, width = 1.5, dash?: string): void {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const extra = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${esc(stroke)}" stroke-width="${width}"${extra}/>`,
    );
  }

  polygon(pts: [number, number][], fill: string, opacity: number): void {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polygon points="${d}" fill="${esc(fill)}" fill-opacity="${opacity}" stroke="none"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${esc(fill)}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${esc(stroke)}" stroke-width="${width}"/>`,
    );
  }

  text(x: number, y: number, content: string, size = 12, fill = "#333"): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" font-family="sans-serif" fill="${esc(fill)}">${esc(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="${XMLNS}" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      `\n</svg>\n`
    );
  }
}
