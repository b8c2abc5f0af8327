import { describe, expect, it } from "vitest";

import { chartSvg } from "../src/chart.js";

const SIZE = { width: 640, height: 320 };

describe("chartSvg", () => {
  it("renders one marker per defined point", () => {
    const svg = chartSvg(
      [
        { sampleIndex: 0, best: 5 },
        { sampleIndex: 1, best: 5 },
        { sampleIndex: 2, best: 3 },
      ],
      SIZE,
    );
    expect(svg.match(/<circle /g)).toHaveLength(3);
    expect(svg).toContain("<polyline");
  });

  it("skips undefined leading points", () => {
    const svg = chartSvg(
      [
        { sampleIndex: 0, best: null },
        { sampleIndex: 1, best: 2 },
      ],
      SIZE,
    );
    expect(svg.match(/<circle /g)).toHaveLength(1);
  });

  it("shows a placeholder with no valid candidates", () => {
    const svg = chartSvg([{ sampleIndex: 0, best: null }], SIZE);
    expect(svg).toContain("no valid candidate yet");
    expect(svg).not.toContain("NaN");
  });

  it("never emits NaN coordinates", () => {
    const svg = chartSvg(
      [
        { sampleIndex: 0, best: 1 },
        { sampleIndex: 1, best: 1 },
      ],
      SIZE,
    );
    expect(svg).not.toContain("NaN");
  });
});
