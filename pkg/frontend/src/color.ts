// Node coloring: the spectrum bin is the same pure function of
// (degree, min_deg, max_deg, palette_size) the exporter uses, so viewer
// colors always agree with the shipped color_bin values. Most-connected
// nodes render lightest, least-connected darkest.

const DARKEST: [number, number, number] = [8, 48, 107];
const LIGHTEST: [number, number, number] = [247, 251, 255];

export function colorBin(degree: number, minDeg: number, maxDeg: number, paletteSize: number): number {
  const span = Math.max(1, maxDeg - minDeg + 1);
  return Math.floor(((degree - minDeg) / span) * paletteSize);
}

export function binColor(bin: number, paletteSize: number): string {
  // Bins run 0..paletteSize-1; the top bin (maximum degree) is lightest.
  const fraction = paletteSize <= 1 ? 1 : Math.min(1, Math.max(0, bin / (paletteSize - 1)));
  const channel = (i: number) => Math.round(DARKEST[i] + (LIGHTEST[i] - DARKEST[i]) * fraction);
  return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`;
}

export function nodeFill(degree: number, minDeg: number, maxDeg: number, paletteSize: number): string {
  return binColor(colorBin(degree, minDeg, maxDeg, paletteSize), paletteSize);
}

export function degreeBounds(degrees: number[]): [number, number] {
  return [Math.min(...degrees), Math.max(...degrees)];
}
