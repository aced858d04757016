import assert from "node:assert/strict";
import { test } from "node:test";

import { ChartError, buildSeries, renderSvg } from "../src/chart.js";
import { BerRow } from "../src/csv.js";

function row(partial: Partial<BerRow>): BerRow {
  return {
    code: "c4-5-2",
    decoder: "pic",
    modulation: "4qam",
    n_rx: 4,
    snr_db: 0,
    trials: 1000,
    bit_errors: 10,
    ber: 1e-2,
    norm_evals_total: 1,
    seed: 42,
    ...partial,
  };
}

function sweep(decoder: string, bers: number[]): BerRow[] {
  return bers.map((ber, i) => row({ decoder, snr_db: 2 * i, ber }));
}

test("one series per group key, sorted", () => {
  const rows = [...sweep("zf", [1e-1, 1e-2]), ...sweep("pic", [5e-2, 1e-3])];
  const series = buildSeries({ rows, groupBy: ["decoder"] });
  assert.deepEqual(
    series.map((s) => s.label),
    ["pic", "zf"],
  );
  assert.equal(series[0].points.length, 2);
});

test("series points are sorted by snr", () => {
  const rows = [row({ snr_db: 8, ber: 1e-3 }), row({ snr_db: 0, ber: 1e-1 })];
  const series = buildSeries({ rows, groupBy: ["decoder"] });
  assert.deepEqual(
    series[0].points.map((p) => p.snr),
    [0, 8],
  );
});

test("zero-ber points clip to the floor and are marked", () => {
  const rows = sweep("pic", [1e-2, 1e-4, 0]);
  const series = buildSeries({ rows, groupBy: ["decoder"], yFloor: 1e-6 });
  const last = series[0].points[2];
  assert.equal(last.ber, 1e-6);
  assert.ok(last.clipped);
  assert.ok(!series[0].points[0].clipped);
  const svg = renderSvg({ rows, groupBy: ["decoder"], yFloor: 1e-6 });
  assert.equal((svg.match(/<path d="M/g) ?? []).length, 1); // one triangle
  assert.equal((svg.match(/<circle/g) ?? []).length, 2);
});

test("log axis ordering: smaller ber sits lower", () => {
  const rows = sweep("pic", [1e-1, 1e-5]);
  const svg = renderSvg({ rows, groupBy: ["decoder"] });
  const points = svg.match(/points="([^"]+)"/)![1].split(" ");
  const y0 = Number(points[0].split(",")[1]);
  const y1 = Number(points[1].split(",")[1]);
  assert.ok(y1 > y0, "lower BER must map to larger y (further down)");
});

test("decade gridlines span 1 down to the floor", () => {
  const svg = renderSvg({ rows: sweep("pic", [1e-1, 1e-3]), groupBy: ["decoder"], yFloor: 1e-6 });
  for (let d = 0; d >= -6; d--) {
    assert.ok(svg.includes(`>1e${d}</text>`), `missing decade label 1e${d}`);
  }
});

test("two decoders give two polylines and two legend entries", () => {
  const rows = [...sweep("zf", [1e-1, 1e-2]), ...sweep("pic", [5e-2, 1e-3])];
  const svg = renderSvg({ rows, groupBy: ["decoder"] });
  assert.equal((svg.match(/<polyline/g) ?? []).length, 2);
  assert.ok(svg.includes('data-series="pic"'));
  assert.ok(svg.includes('data-series="zf"'));
});

test("group by code and decoder", () => {
  const rows = [
    row({ code: "a", decoder: "pic" }),
    row({ code: "b", decoder: "pic", snr_db: 2 }),
  ];
  const series = buildSeries({ rows, groupBy: ["code", "decoder"] });
  assert.deepEqual(
    series.map((s) => s.label),
    ["a/pic", "b/pic"],
  );
});

test("empty selection is an error", () => {
  assert.throws(() => renderSvg({ rows: [], groupBy: ["decoder"] }), ChartError);
});

test("rendering is deterministic", () => {
  const rows = [...sweep("zf", [1e-1, 1e-2, 0]), ...sweep("pic", [5e-2, 1e-3, 1e-7])];
  const a = renderSvg({ rows, groupBy: ["decoder"], title: "t" });
  const b = renderSvg({ rows, groupBy: ["decoder"], title: "t" });
  assert.equal(a, b);
});
