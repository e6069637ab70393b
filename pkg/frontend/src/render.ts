/** Canvas painting. Pure consumers of the render model; no state of their
 *  own beyond the 2D contexts handed in. */

import { densityCurve } from "./beta.js";
import type { ConsoleModel, OperatorRow } from "./client.js";
import type { Point } from "./protocol.js";
import type { ViewTransform } from "./transform.js";

const BACKGROUND = "#10131a";
const GRID_FRAME = "#3a4253";
const STROKE_COLOR = "#ffd54a";
const ECHO_COLOR = "#5dde8f";
const MMSE_COLOR = "#4fc3f7";
const MAP_COLOR = "#ff9e42";
const TRUTH_COLOR = "#f2f4f8";
const NOTICE_COLOR = "#ff6d6d";
const TEXT_COLOR = "#c7cdd9";

function polyPath(ctx: CanvasRenderingContext2D, pts: Point[], close: boolean): void {
  if (pts.length === 0) {
    return;
  }
  ctx.beginPath();
  ctx.moveTo(pts[0]![0], pts[0]![1]);
  for (let i = 1; i < pts.length; i++) {
    ctx.lineTo(pts[i]![0], pts[i]![1]);
  }
  if (close) {
    ctx.closePath();
  }
}

export function drawScene(ctx: CanvasRenderingContext2D, model: ConsoleModel,
                          view: ViewTransform | null, showBelief: boolean): void {
  const { canvas } = ctx;
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (view === null) {
    ctx.fillStyle = TEXT_COLOR;
    ctx.font = "14px system-ui, sans-serif";
    ctx.fillText("waiting for session hello...", 16, 28);
    return;
  }

  const [xmin, ymin, xmax, ymax] = view.bounds;
  if (model.heat !== null && showBelief) {
    const { rows, cols, rgba } = model.heat;
    const dx = (xmax - xmin) / cols;
    const dy = (ymax - ymin) / rows;
    for (let r = 0; r < rows; r++) {
      for (let c = 0; c < cols; c++) {
        const px = ((rows - 1 - r) * cols + c) * 4;
        ctx.fillStyle = `rgb(${rgba[px]},${rgba[px + 1]},${rgba[px + 2]})`;
        const [u0, v0] = view.worldToPx([xmin + c * dx, ymin + (r + 1) * dy]);
        const [u1, v1] = view.worldToPx([xmin + (c + 1) * dx, ymin + r * dy]);
        ctx.fillRect(u0, v0, u1 - u0 + 0.5, v1 - v0 + 0.5);
      }
    }
  }

  const [fu0, fv0] = view.worldToPx([xmin, ymax]);
  const [fu1, fv1] = view.worldToPx([xmax, ymin]);
  ctx.strokeStyle = GRID_FRAME;
  ctx.lineWidth = 1;
  ctx.strokeRect(fu0, fv0, fu1 - fu0, fv1 - fv0);

  if (model.echo !== null && model.echo.px.length >= 3) {
    polyPath(ctx, model.echo.px, true);
    ctx.strokeStyle = ECHO_COLOR;
    ctx.lineWidth = 2;
    ctx.stroke();
  }

  if (model.truthPx !== null) {
    const [u, v] = model.truthPx;
    ctx.strokeStyle = TRUTH_COLOR;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(u - 7, v);
    ctx.lineTo(u + 7, v);
    ctx.moveTo(u, v - 7);
    ctx.lineTo(u, v + 7);
    ctx.stroke();
  }
  if (model.mapPx !== null) {
    const [u, v] = model.mapPx;
    ctx.strokeStyle = MAP_COLOR;
    ctx.lineWidth = 2;
    ctx.strokeRect(u - 5, v - 5, 10, 10);
  }
  if (model.mmsePx !== null) {
    const [u, v] = model.mmsePx;
    ctx.strokeStyle = MMSE_COLOR;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(u, v, 6, 0, 2 * Math.PI);
    ctx.stroke();
  }

  if (model.strokePx.length > 0) {
    polyPath(ctx, model.strokePx, false);
    ctx.strokeStyle = STROKE_COLOR;
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }

  ctx.font = "13px system-ui, sans-serif";
  ctx.fillStyle = TEXT_COLOR;
  const hud: string[] = [];
  hud.push(model.t === null ? "t -" : `t ${model.t}`);
  if (model.rmse !== null) {
    hud.push(`rmse ${model.rmse.toFixed(3)}`);
  }
  if (model.running !== null) {
    hud.push(model.running ? `running x${model.speed}` : "paused");
  }
  if (model.predictedM !== null) {
    hud.push(`predicted M ${model.predictedM}`);
  }
  if (model.echo !== null) {
    hud.push(`acked M ${model.echo.m} @ t=${model.echo.tApplied}`);
  }
  if (model.degenerate) {
    hud.push("degenerate update (prior kept)");
  }
  ctx.fillText(hud.join("   "), 12, 20);
  if (model.notice !== null) {
    ctx.fillStyle = NOTICE_COLOR;
    ctx.fillText(model.notice, 12, 40);
  }
}

export function drawPanel(ctx: CanvasRenderingContext2D,
                          operators: OperatorRow[]): void {
  const { canvas } = ctx;
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px system-ui, sans-serif";
  if (operators.length === 0) {
    ctx.fillStyle = TEXT_COLOR;
    ctx.fillText("no operators yet", 12, 20);
    return;
  }
  const rowH = Math.min(120, canvas.height / operators.length);
  const plotW = canvas.width - 24;
  operators.forEach((op, idx) => {
    const top = idx * rowH;
    const plotH = rowH - 34;
    let yMax = 0;
    const curves = op.curves.map((c) => {
      const d = densityCurve(c.alpha, c.beta, 96);
      yMax = Math.max(yMax, Math.min(d.peakY, 50));
      return { fade: c.fade, d };
    });
    for (const { fade, d } of curves) {
      ctx.globalAlpha = 0.15 + 0.85 * fade;
      ctx.strokeStyle = MMSE_COLOR;
      ctx.lineWidth = fade === 1 ? 2 : 1;
      ctx.beginPath();
      for (let i = 0; i < d.xs.length; i++) {
        const u = 12 + d.xs[i]! * plotW;
        const y = Math.min(d.ys[i]!, 50);
        const v = top + 22 + plotH * (1 - (yMax > 0 ? y / yMax : 0));
        if (i === 0) {
          ctx.moveTo(u, v);
        } else {
          ctx.lineTo(u, v);
        }
      }
      ctx.stroke();
    }
    ctx.globalAlpha = 1;
    ctx.strokeStyle = MAP_COLOR;
    ctx.lineWidth = 1;
    const meanU = 12 + op.mean * plotW;
    ctx.beginPath();
    ctx.moveTo(meanU, top + 22);
    ctx.lineTo(meanU, top + 22 + plotH);
    ctx.stroke();
    ctx.fillStyle = TEXT_COLOR;
    const qs = op.q_s === undefined ? "" : `  q_s ${op.q_s.toFixed(3)}`;
    ctx.fillText(
      `${op.id}  Beta(${op.alpha.toFixed(2)}, ${op.beta.toFixed(2)})  ` +
      `mean ${op.mean.toFixed(3)}${qs}`,
      12, top + 14);
  });
}
