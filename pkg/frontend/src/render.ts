/** Pure view-data builders: schematic shapes drawn from raw state vectors
 * and bar-chart data. No physics here; every value is arithmetic on what
 * the server sent. Coordinates are in an abstract [0,1]x[0,1] viewport
 * with y pointing down. */

import { ImportanceResponse } from "./api.js";

export interface BarDatum {
  label: string;
  value: number;
}

export interface LineShape {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
  color: string;
}

export interface RectShape {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  angle: number; // radians, about the rect centre
  color: string;
}

export interface CircleShape {
  kind: "circle";
  x: number;
  y: number;
  r: number;
  color: string;
}

export type Shape = LineShape | RectShape | CircleShape;

export function importanceBars(importance: ImportanceResponse): BarDatum[] {
  return importance.feature_names.map((label, i) => ({
    label,
    value: importance.scores[i] ?? 0,
  }));
}

export function probabilityBars(probabilities: number[]): BarDatum[] {
  return probabilities.map((value, i) => ({ label: `a${i}`, value }));
}

const GROUND = 0.78;

function cartPole(state: number[]): Shape[] {
  const [x, , theta] = state;
  const cx = 0.5 + (x / 2.4) * 0.4; // track spans ±2.4
  const cy = GROUND - 0.05;
  const poleLen = 0.28;
  return [
    { kind: "line", x1: 0.05, y1: GROUND, x2: 0.95, y2: GROUND, width: 2, color: "#888" },
    { kind: "rect", x: cx - 0.06, y: cy - 0.03, w: 0.12, h: 0.06, angle: 0, color: "#4477cc" },
    {
      kind: "line",
      x1: cx,
      y1: cy - 0.03,
      x2: cx + poleLen * Math.sin(theta),
      y2: cy - 0.03 - poleLen * Math.cos(theta),
      width: 5,
      color: "#cc8844",
    },
    { kind: "circle", x: cx, y: cy - 0.03, r: 0.012, color: "#222" },
  ];
}

function acrobot(state: number[]): Shape[] {
  // angles arrive sin/cos encoded, measured from the downward vertical
  const [s1, c1, s2, c2] = state;
  const link = 0.22;
  const pivotX = 0.5;
  const pivotY = 0.35;
  // direction of link 1 is (sin th1, cos th1) in screen coords (y down)
  const x1 = pivotX + link * s1;
  const y1 = pivotY + link * c1;
  // link 2 hangs at th1 + th2: use the angle-sum identities on the encoded values
  const s12 = s1 * c2 + c1 * s2;
  const c12 = c1 * c2 - s1 * s2;
  const x2 = x1 + link * s12;
  const y2 = y1 + link * c12;
  return [
    { kind: "line", x1: 0.2, y1: pivotY - link, x2: 0.8, y2: pivotY - link, width: 1, color: "#aa4444" },
    { kind: "circle", x: pivotX, y: pivotY, r: 0.015, color: "#222" },
    { kind: "line", x1: pivotX, y1: pivotY, x2: x1, y2: y1, width: 6, color: "#44aa66" },
    { kind: "circle", x: x1, y: y1, r: 0.015, color: "#222" },
    { kind: "line", x1, y1, x2, y2, width: 6, color: "#66cc88" },
    { kind: "circle", x: x2, y: y2, r: 0.012, color: "#222" },
  ];
}

function lander(state: number[]): Shape[] {
  const [x, y, , , theta, , legL, legR] = state;
  const cx = 0.5 + x * 0.3;
  const cy = GROUND - y * 0.45;
  const shapes: Shape[] = [
    { kind: "line", x1: 0.02, y1: GROUND, x2: 0.98, y2: GROUND, width: 2, color: "#888" },
    // landing pad spans x in [-0.2, 0.2]
    { kind: "line", x1: 0.5 - 0.2 * 0.3, y1: GROUND, x2: 0.5 + 0.2 * 0.3, y2: GROUND, width: 6, color: "#cc4" },
    { kind: "rect", x: cx - 0.03, y: cy - 0.02, w: 0.06, h: 0.04, angle: theta, color: "#7755cc" },
  ];
  const legColor = (down: number) => (down ? "#2b2" : "#555");
  shapes.push(
    { kind: "line", x1: cx - 0.02, y1: cy + 0.02, x2: cx - 0.035, y2: cy + 0.045, width: 3, color: legColor(legL) },
    { kind: "line", x1: cx + 0.02, y1: cy + 0.02, x2: cx + 0.035, y2: cy + 0.045, width: 3, color: legColor(legR) },
  );
  return shapes;
}

export function schematic(env: string, state: number[]): Shape[] {
  switch (env) {
    case "cartpole":
      return cartPole(state);
    case "acrobot":
      return acrobot(state);
    case "lander":
      return lander(state);
    default:
      return [];
  }
}
