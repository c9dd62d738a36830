/**
 * Batch figure renderer for the simulator's CSV/JSON outputs.
 *
 * Usage:
 *   render --kind <decay-loglog|growth-AB|resonance-heatmap|lifespan-fit>
 *          --in <csv> [<meta.json>] --out <svg> [--width N] [--height N] [--title S]
 *
 * Renders server-side to SVG (no DOM); exits nonzero with a message on
 * schema mismatch.  Inputs are never modified.
 */

import { writeFileSync } from "node:fs";
import * as echarts from "echarts";
import { SchemaError } from "./csv";
import { BuiltFigure, FigureKind, FigureStyle, buildFigure } from "./figures";

const KINDS: FigureKind[] = ["decay-loglog", "growth-AB", "resonance-heatmap", "lifespan-fit"];

export interface RenderRequest {
  kind: FigureKind;
  inputs: string[];
  out: string;
  style: FigureStyle;
}

export function parseArgs(argv: string[]): RenderRequest {
  const inputs: string[] = [];
  let kind: string | null = null;
  let out: string | null = null;
  const style: FigureStyle = { width: 840, height: 560 };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    switch (a) {
      case "--kind":
        kind = argv[++i];
        break;
      case "--in":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) inputs.push(argv[++i]);
        break;
      case "--out":
        out = argv[++i];
        break;
      case "--width":
        style.width = Number(argv[++i]);
        break;
      case "--height":
        style.height = Number(argv[++i]);
        break;
      case "--title":
        style.title = argv[++i];
        break;
      default:
        throw new SchemaError(`unknown argument '${a}'`);
    }
  }
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    throw new SchemaError(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (inputs.length === 0 || !out) throw new SchemaError("--in and --out are required");
  if (!Number.isFinite(style.width) || !Number.isFinite(style.height) || style.width <= 0 || style.height <= 0) {
    throw new SchemaError("--width/--height must be positive numbers");
  }
  return { kind: kind as FigureKind, inputs, out, style };
}

export function renderToSvg(figure: BuiltFigure, style: FigureStyle): string {
  const chart = echarts.init(null as unknown as HTMLElement, null, {
    renderer: "svg",
    ssr: true,
    width: style.width,
    height: style.height,
  });
  chart.setOption(figure.option);
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}

export function renderFigure(req: RenderRequest): BuiltFigure {
  const figure = buildFigure(req.kind, req.inputs, req.style);
  writeFileSync(req.out, renderToSvg(figure, req.style));
  return figure;
}

export function main(argv: string[]): number {
  let req: RenderRequest;
  try {
    req = parseArgs(argv);
  } catch (e) {
    console.error(`render: ${(e as Error).message}`);
    return 2;
  }
  try {
    const figure = renderFigure(req);
    console.error(`wrote ${req.out}`);
    for (const [k, v] of Object.entries(figure.prechecks)) {
      console.error(`  precheck ${k} = ${v}`);
    }
    return 0;
  } catch (e) {
    if (e instanceof SchemaError) {
      console.error(`render: schema mismatch: ${e.message}`);
      return 1;
    }
    console.error(`render: ${(e as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
