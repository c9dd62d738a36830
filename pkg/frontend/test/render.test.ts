import { describe, expect, it } from "vitest";
import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { SchemaError } from "../src/csv";
import { buildFigure } from "../src/figures";
import { parseArgs } from "../src/render";

const FIX = join(__dirname, "..", "fixtures");
const SCRIPT = join(__dirname, "..", "dist", "render.js");
const outDir = mkdtempSync(join(tmpdir(), "nlslab-plots-"));

// one process per figure, matching the renderer's concurrency model
function renderKind(kind: string, inputs: string[], name: string) {
  const out = join(outDir, name);
  const res = spawnSync(process.execPath, [SCRIPT, "--kind", kind, "--in", ...inputs, "--out", out], {
    encoding: "utf8",
  });
  return { code: res.status, out, stderr: res.stderr };
}

describe("render CLI", () => {
  it("renders the decay figure and overlays an exact -1/2 reference", () => {
    const { code, out } = renderKind("decay-loglog", [join(FIX, "norms.csv")], "decay.svg");
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(statSync(out).size).toBeGreaterThan(0);
    const fig = buildFigure("decay-loglog", [join(FIX, "norms.csv")], { width: 800, height: 600 });
    expect(fig.prechecks.referenceSlope).toBeCloseTo(-0.5, 12);
    expect(fig.prechecks.anchorMatchesData).toBe(true);
  });

  it("renders the growth figure; A and B coincide on the fixture", () => {
    const inputs = [join(FIX, "growth.csv"), join(FIX, "growth.json")];
    const { code, out } = renderKind("growth-AB", inputs, "growth.svg");
    expect(code).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(0);
    const fig = buildFigure("growth-AB", inputs, { width: 800, height: 600 });
    expect(fig.prechecks.maxAbsDifference).toBe(0);
    expect(Number.isFinite(fig.prechecks.thresholdMarker as number)).toBe(true);
  });

  it("renders the resonance heatmap with its minimum at the origin", () => {
    const { code, out } = renderKind("resonance-heatmap", [join(FIX, "resonance_psi.csv")], "resonance.svg");
    expect(code).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(0);
    const fig = buildFigure("resonance-heatmap", [join(FIX, "resonance_psi.csv")], { width: 800, height: 600 });
    expect(fig.prechecks.minIsAtOrigin).toBe(true);
    expect(fig.prechecks.minValue).toBe(0);
  });

  it("renders the lifespan fit and recovers the synthetic slope", () => {
    const { code, out } = renderKind("lifespan-fit", [join(FIX, "sweep.csv")], "lifespan.svg");
    expect(code).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(0);
    const fig = buildFigure("lifespan-fit", [join(FIX, "sweep.csv")], { width: 800, height: 600 });
    expect(fig.prechecks.slope).toBeCloseTo(5.0, 9);
    expect(fig.prechecks.rSquared).toBeCloseTo(1.0, 12);
  });

  it("is deterministic: same inputs give identical bytes", () => {
    const a = renderKind("decay-loglog", [join(FIX, "norms.csv")], "det-a.svg");
    const b = renderKind("decay-loglog", [join(FIX, "norms.csv")], "det-b.svg");
    expect(a.code).toBe(0);
    expect(b.code).toBe(0);
    expect(readFileSync(a.out)).toEqual(readFileSync(b.out));
  });

  it("never mutates its inputs", () => {
    const src = join(FIX, "growth.csv");
    const before = readFileSync(src, "utf8");
    renderKind("growth-AB", [src], "immut.svg");
    expect(readFileSync(src, "utf8")).toBe(before);
  });

  it("rejects schema mismatches with a nonzero exit", () => {
    const bad = join(outDir, "bad.csv");
    writeFileSync(bad, "a,b\n1,2\n");
    const { code, stderr } = renderKind("decay-loglog", [bad], "x.svg");
    expect(code).toBe(1);
    expect(stderr).toContain("schema mismatch");
    expect(existsSync(join(outDir, "x.svg"))).toBe(false);
  });

  it("skips sweep rows with an empty crossing time", () => {
    const partial = join(outDir, "partial-sweep.csv");
    writeFileSync(
      partial,
      "eps,crossing_time,a0,termination\n0.45,,0.46,completed\n0.55,4.1,0.74,blow-up\n0.65,2.76,1.14,blow-up\n"
    );
    const fig = buildFigure("lifespan-fit", [partial], { width: 10, height: 10 });
    expect(fig.prechecks.points).toBe(2);
  });

  it("rejects wrong column layout for the resonance scan", () => {
    const bad = join(outDir, "badres.csv");
    writeFileSync(bad, "xi1,xi2,value\n0,0,0\n");
    expect(() => buildFigure("resonance-heatmap", [bad], { width: 10, height: 10 })).toThrow(SchemaError);
  });

  it("rejects unknown kinds and missing arguments", () => {
    expect(renderKind("pie", ["x"], "y.svg").code).toBe(2);
    expect(() => parseArgs(["--kind", "decay-loglog"])).toThrow(SchemaError);
  });
});
