/**
 * Figure builders: each returns an echarts option plus data-level pre-check
 * values.  Assertions belong on the parsed data (the pre-checks), never on
 * rendered pixels; callers smoke-test the written image for existence only.
 */

import type { EChartsOption } from "echarts";
import { SchemaError, Table, column, readGrowthSeries, readNormSeries, readResonanceScan, readSweep, requireFinite } from "./csv";
import { readFileSync } from "node:fs";

export type FigureKind = "decay-loglog" | "growth-AB" | "resonance-heatmap" | "lifespan-fit";

export interface FigureStyle {
  width: number;
  height: number;
  title?: string;
}

export interface BuiltFigure {
  option: EChartsOption;
  prechecks: Record<string, number | boolean>;
}

const BASE: Partial<EChartsOption> = {
  animation: false,
  backgroundColor: "#ffffff",
};

function log10(xs: number[]): number[] {
  return xs.map((v) => Math.log10(v));
}

function linfit(x: number[], y: number[]): { slope: number; intercept: number; r2: number } {
  const n = x.length;
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0,
    sxy = 0,
    ssTot = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) ** 2;
    sxy += (x[i] - mx) * (y[i] - my);
    ssTot += (y[i] - my) ** 2;
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssRes = 0;
  for (let i = 0; i < n; i++) ssRes += (y[i] - slope * x[i] - intercept) ** 2;
  return { slope, intercept, r2: ssTot > 0 ? 1 - ssRes / ssTot : 1 };
}

/** Log-log decay of |u|_inf with a t^{-1/2} reference line anchored at the window start. */
export function buildDecayLogLog(normsCsv: string, style: FigureStyle): BuiltFigure {
  const table = readNormSeries(normsCsv);
  const t = requireFinite(column(table, "t", normsCsv), "t");
  const linf = requireFinite(column(table, "Linf", normsCsv), "Linf");
  if (t.some((v) => v <= 0) || linf.some((v) => v <= 0)) {
    throw new SchemaError(`${normsCsv}: decay figure needs positive t and Linf`);
  }
  // reference c * t^{-1/2} through the first point with t >= 10 (or the first point)
  const anchor = Math.max(
    t.findIndex((v) => v >= 10),
    0
  );
  const c = linf[anchor] * Math.sqrt(t[anchor]);
  const reference = t.map((v) => c / Math.sqrt(v));
  const refFit = linfit(log10(t), log10(reference));

  const option: EChartsOption = {
    ...BASE,
    title: { text: style.title ?? "sup-norm decay", left: "center" },
    xAxis: { type: "log", name: "t" },
    yAxis: { type: "log", name: "|u|_inf" },
    legend: { bottom: 0 },
    series: [
      { type: "line", name: "|u(t)|_inf", showSymbol: false, data: t.map((v, i) => [v, linf[i]]) },
      {
        type: "line",
        name: "c t^{-1/2} reference",
        showSymbol: false,
        lineStyle: { type: "dashed" },
        data: t.map((v, i) => [v, reference[i]]),
      },
    ],
  };
  return {
    option,
    prechecks: {
      referenceSlope: refFit.slope, // exactly -1/2 in log10-log10 space
      referenceAnchorValue: reference[anchor],
      anchorMatchesData: Math.abs(reference[anchor] - linf[anchor]) <= 1e-12 * linf[anchor],
      points: t.length,
    },
  };
}

/** Amplitude A(t, xi0) against the closed-form ODE solution B(t), with the threshold-time marker. */
export function buildGrowthAB(growthCsv: string, style: FigureStyle, metaJson?: string): BuiltFigure {
  const table = readGrowthSeries(growthCsv);
  const t = requireFinite(column(table, "t", growthCsv), "t");
  const a = requireFinite(column(table, "A", growthCsv), "A");
  const b = column(table, "B", growthCsv); // NaN allowed past the blow-up horizon
  let tK: number | null = null;
  if (metaJson) {
    const meta = JSON.parse(readFileSync(metaJson, "utf8"));
    if (typeof meta.threshold_time !== "number") {
      throw new SchemaError(`${metaJson}: missing numeric threshold_time`);
    }
    tK = meta.threshold_time;
  }
  let maxDiff = 0;
  for (let i = 0; i < t.length; i++) {
    if (Number.isFinite(b[i])) maxDiff = Math.max(maxDiff, Math.abs(a[i] - b[i]));
  }
  const series: EChartsOption["series"] = [
    { type: "line", name: "A(t, xi0)", showSymbol: false, data: t.map((v, i) => [v, a[i]]) },
    {
      type: "line",
      name: "B(t) (ODE)",
      showSymbol: false,
      lineStyle: { type: "dashed" },
      data: t.map((v, i) => [v, b[i]]).filter((p) => Number.isFinite(p[1])),
    },
  ];
  if (tK !== null) {
    series.push({
      type: "line",
      name: "T_K",
      markLine: { symbol: "none", data: [{ xAxis: tK }], label: { formatter: "T_K" } },
      data: [],
    });
  }
  const option: EChartsOption = {
    ...BASE,
    title: { text: style.title ?? "amplitude vs ODE", left: "center" },
    xAxis: { type: "log", name: "t" },
    yAxis: { type: "value", name: "A" },
    legend: { bottom: 0 },
    series,
  };
  return {
    option,
    prechecks: {
      maxAbsDifference: maxDiff,
      thresholdMarker: tK ?? NaN,
      points: t.length,
    },
  };
}

/** Heatmap of the resonance score over (xi1, xi2); input is the min-over-xi3 summary scan. */
export function buildResonanceHeatmap(scanCsv: string, style: FigureStyle): BuiltFigure {
  const table = readResonanceScan(scanCsv);
  const x1 = column(table, "xi1", scanCsv);
  const x2 = column(table, "xi2", scanCsv);
  const val = requireFinite(column(table, "value", scanCsv), "value");
  const xs = Array.from(new Set(x1)).sort((p, q) => p - q);
  const ys = Array.from(new Set(x2)).sort((p, q) => p - q);
  if (xs.length * ys.length !== val.length) {
    throw new SchemaError(`${scanCsv}: rows do not form a complete (xi1, xi2) lattice`);
  }
  const ix = new Map(xs.map((v, i) => [v, i]));
  const iy = new Map(ys.map((v, i) => [v, i]));
  const cells: [number, number, number][] = [];
  let best = Infinity;
  let bestAt: [number, number] = [NaN, NaN];
  for (let i = 0; i < val.length; i++) {
    cells.push([ix.get(x1[i])!, iy.get(x2[i])!, val[i]]);
    if (val[i] < best) {
      best = val[i];
      bestAt = [x1[i], x2[i]];
    }
  }
  const option: EChartsOption = {
    ...BASE,
    title: { text: style.title ?? "resonance score (min over xi3)", left: "center" },
    xAxis: { type: "category", data: xs.map((v) => v.toPrecision(3)), name: "xi1" },
    yAxis: { type: "category", data: ys.map((v) => v.toPrecision(3)), name: "xi2" },
    visualMap: { min: 0, max: Math.max(...val), calculable: true, orient: "horizontal", left: "center", bottom: 0 },
    series: [{ type: "heatmap", data: cells, progressive: 0 }],
  };
  return {
    option,
    prechecks: {
      minValue: best,
      minAtXi1: bestAt[0],
      minAtXi2: bestAt[1],
      minIsAtOrigin: Math.abs(bestAt[0]) < 1e-12 && Math.abs(bestAt[1]) < 1e-12,
    },
  };
}

/** log T_cross against eps^{-2} with the fitted lifespan line. */
export function buildLifespanFit(sweepCsv: string, style: FigureStyle): BuiltFigure {
  const { eps, crossing } = readSweep(sweepCsv);
  if (crossing.some((v) => v <= 1)) throw new SchemaError(`${sweepCsv}: crossing times must exceed 1`);
  const x = eps.map((e) => e ** -2);
  const y = crossing.map((v) => Math.log(v));
  const fit = linfit(x, y);
  const xs = [Math.min(...x), Math.max(...x)];
  const option: EChartsOption = {
    ...BASE,
    title: { text: style.title ?? "lifespan scaling", left: "center" },
    xAxis: { type: "value", name: "eps^{-2}" },
    yAxis: { type: "value", name: "log T_cross" },
    legend: { bottom: 0 },
    series: [
      { type: "scatter", name: "runs", data: x.map((v, i) => [v, y[i]]) },
      {
        type: "line",
        name: "fit",
        showSymbol: false,
        data: xs.map((v) => [v, fit.slope * v + fit.intercept]),
      },
    ],
  };
  return {
    option,
    prechecks: { slope: fit.slope, rSquared: fit.r2, points: eps.length },
  };
}

export function buildFigure(kind: FigureKind, inputs: string[], style: FigureStyle): BuiltFigure {
  if (inputs.length === 0) throw new SchemaError("no input files given");
  switch (kind) {
    case "decay-loglog":
      return buildDecayLogLog(inputs[0], style);
    case "growth-AB":
      return buildGrowthAB(inputs[0], style, inputs[1]);
    case "resonance-heatmap":
      return buildResonanceHeatmap(inputs[0], style);
    case "lifespan-fit":
      return buildLifespanFit(inputs[0], style);
    default:
      throw new SchemaError(`unknown figure kind '${kind}'`);
  }
}
