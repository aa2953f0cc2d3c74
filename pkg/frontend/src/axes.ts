/** Shared panel frame: border, log/linear ticks, labels. */

import { Attrs, Scale, decadeTicks, el, fmt, niceTicks, tickLabel } from "./svg";

export interface Frame {
  x0: number;
  y0: number;
  width: number;
  height: number;
}

export function panelFrame(frame: Frame, cls: string): string {
  return el("rect", {
    x: frame.x0,
    y: frame.y0,
    width: frame.width,
    height: frame.height,
    fill: "white",
    stroke: "black",
    "stroke-width": 1,
    class: cls,
  });
}

export function logXAxis(frame: Frame, scale: Scale, label: string, fontSize = 11): string {
  const parts: string[] = [];
  const yb = frame.y0 + frame.height;
  for (const t of decadeTicks(scale.domain[0], scale.domain[1])) {
    const x = scale(t);
    parts.push(el("line", { x1: fmt(x), y1: yb, x2: fmt(x), y2: yb - 5, stroke: "black" }));
    parts.push(
      el("text", {
        x: fmt(x), y: yb + fontSize + 3, "text-anchor": "middle",
        "font-size": fontSize, class: "xtick",
      }, [tickLabel(t)]),
    );
  }
  parts.push(
    el("text", {
      x: frame.x0 + frame.width / 2, y: yb + 2.6 * fontSize,
      "text-anchor": "middle", "font-size": fontSize + 1, class: "xlabel",
    }, [label]),
  );
  return parts.join("");
}

export function yAxis(
  frame: Frame,
  scale: Scale,
  label: string,
  opts: { log?: boolean; fontSize?: number } = {},
): string {
  const fontSize = opts.fontSize ?? 11;
  const parts: string[] = [];
  const ticks = opts.log
    ? decadeTicks(scale.domain[0], scale.domain[1])
    : niceTicks(scale.domain[0], scale.domain[1]);
  for (const t of ticks) {
    const y = scale(t);
    parts.push(el("line", { x1: frame.x0, y1: fmt(y), x2: frame.x0 + 5, y2: fmt(y), stroke: "black" }));
    parts.push(
      el("text", {
        x: frame.x0 - 4, y: fmt(y + fontSize / 3), "text-anchor": "end",
        "font-size": fontSize, class: "ytick",
      }, [tickLabel(t)]),
    );
  }
  parts.push(
    el("text", {
      x: frame.x0 - 38, y: frame.y0 + frame.height / 2,
      transform: `rotate(-90 ${frame.x0 - 38} ${frame.y0 + frame.height / 2})`,
      "text-anchor": "middle", "font-size": fontSize + 1, class: "ylabel",
    }, [label]),
  );
  return parts.join("");
}

export function legend(
  entries: { label: string; color: string }[],
  x: number,
  y: number,
  attrs: Attrs = {},
): string {
  const parts: string[] = [];
  entries.forEach((entry, i) => {
    const yy = y + i * 14;
    parts.push(el("line", { x1: x, y1: yy, x2: x + 18, y2: yy, stroke: entry.color, "stroke-width": 1.5 }));
    parts.push(el("text", { x: x + 23, y: yy + 4, "font-size": 10, class: "legend", ...attrs }, [entry.label]));
  });
  return parts.join("");
}
