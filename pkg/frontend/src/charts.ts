/** CSV time series parsing and a dependency-free SVG line chart. */

export interface Series {
  label: string;
  columns: string[];
  times: number[];
  values: number[][]; // one row per sample, one column per value column
}

export function parseSeriesCsv(text: string): Series {
  const lines = text.trim().split("\n");
  let label = "";
  let start = 0;
  if (lines[0]?.startsWith("#")) {
    label = lines[0].replace(/^#\s*/, "");
    start = 1;
  }
  const header = lines[start].split(",");
  if (header[0] !== "time") {
    throw new Error(`not a time-series CSV (header: ${lines[start]})`);
  }
  const columns = header.slice(1);
  const times: number[] = [];
  const values: number[][] = [];
  for (const line of lines.slice(start + 1)) {
    if (!line.trim()) continue;
    const parts = line.split(",").map(Number);
    times.push(parts[0]);
    values.push(parts.slice(1));
  }
  return { label, columns, times, values };
}

const PALETTE = ["#1f6fb2", "#b23a1f", "#2e8540", "#7146a8"];

function fmt(x: number): string {
  return Number(x.toPrecision(6)).toString();
}

export function lineChartSvg(series: Series, width = 420, height = 220): string {
  const m = { left: 48, right: 12, top: 18, bottom: 30 };
  const innerW = width - m.left - m.right;
  const innerH = height - m.top - m.bottom;
  const { times, values } = series;
  const flat = values.flat();
  const tMin = Math.min(...times);
  const tMax = Math.max(...times);
  const vMin = Math.min(...flat);
  const vMax = Math.max(...flat);
  const tSpan = tMax - tMin || 1;
  const vSpan = vMax - vMin || 1;

  const x = (t: number) => m.left + ((t - tMin) / tSpan) * innerW;
  const y = (v: number) => m.top + (1 - (v - vMin) / vSpan) * innerH;

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" class="chart">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<rect x="${m.left}" y="${m.top}" width="${innerW}" height="${innerH}" ` +
      `fill="none" stroke="#999"/>`,
  ];
  const nCols = values[0]?.length ?? 0;
  for (let c = 0; c < nCols; c++) {
    const pts = times
      .map((t, i) => `${fmt(x(t))},${fmt(y(values[i][c]))}`)
      .join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${PALETTE[c % PALETTE.length]}" ` +
        `stroke-width="1.5"/>`,
    );
  }
  parts.push(
    `<text x="${m.left}" y="12" font-size="11">${escapeXml(series.label)}</text>`,
    `<text x="${m.left}" y="${height - 8}" font-size="10">t = ${fmt(tMin)} s</text>`,
    `<text x="${width - m.right - 60}" y="${height - 8}" font-size="10">t = ${fmt(tMax)} s</text>`,
    `<text x="4" y="${m.top + 10}" font-size="10">${fmt(vMax)}</text>`,
    `<text x="4" y="${m.top + innerH}" font-size="10">${fmt(vMin)}</text>`,
    `</svg>`,
  );
  return parts.join("\n");
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
