import init, { roundingCurve, analyze, roundingHistogram } from "./pkg/qmc_theta_demo.js";

const $ = (id) => document.getElementById(id);

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
}

function plotCurve() {
  $("curve-err").textContent = "";
  const r = Number($("curve-r").value);
  let ys;
  try {
    ys = roundingCurve(r, 401);
  } catch (e) {
    $("curve-err").textContent = e.message ?? String(e);
    return;
  }
  const canvas = $("curve");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  axes(ctx, w, h, pad);
  const px = (t) => pad + ((t + 1) / 2) * (w - 2 * pad);
  const py = (y) => h - pad - ((y + 1) / 2) * (h - 2 * pad);

  ctx.setLineDash([4, 4]);
  ctx.strokeStyle = "#aaa";
  ctx.beginPath();
  ctx.moveTo(px(-1), py(-1));
  ctx.lineTo(px(1), py(1));
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.strokeStyle = "#06c";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ys.forEach((y, i) => {
    const t = -1 + (2 * i) / (ys.length - 1);
    i === 0 ? ctx.moveTo(px(t), py(y)) : ctx.lineTo(px(t), py(y));
  });
  ctx.stroke();

  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.fillText("t = -1", pad, h - 10);
  ctx.fillText("t = 1", w - pad - 30, h - 10);
  ctx.fillText(`r = ${r}`, pad + 8, pad + 16);
}

function fmt(x) {
  return typeof x === "number" ? x.toPrecision(8) : String(x);
}

function runReport() {
  const out = $("rep-out");
  out.innerHTML = "running&hellip;";
  setTimeout(() => {
    let report;
    try {
      report = JSON.parse(
        analyze($("rep-spec").value.trim(), $("rep-model").value, Number($("rep-trials").value), Number($("rep-seed").value)),
      );
    } catch (e) {
      out.innerHTML = `<p class="error">${e.message ?? e}</p>`;
      return;
    }
    const model = report.options.model;
    const bound = report.bounds.find((b) => b.model === model).bound;
    const constant = report.constants.find((c) => c.model === model);
    const exact = report.exact[model];
    const rows = report.checks
      .map(
        (c) =>
          `<tr class="${c.pass ? "pass" : "fail"}"><td>${c.pass ? "PASS" : "FAIL"}</td><td>${c.name}</td>` +
          `<td>${c.lhs_name} = ${fmt(c.lhs)}</td><td>${c.rhs_name} = ${fmt(c.rhs)}</td><td>${c.slack.toExponential(3)}</td></tr>`,
      )
      .join("");
    out.innerHTML =
      `<pre>n = ${report.graph.n}, m = ${report.graph.m}\n` +
      `kappa = ${fmt(report.theta.kappa)}   (edge inner product t = ${fmt(report.theta.t)})\n` +
      `bound[${model}] = ${fmt(bound)}   with c = ${constant.symbol} = ${fmt(constant.value)}\n` +
      `rounding mean = ${fmt(report.rounding.mean)} ± ${report.rounding.stderr.toExponential(2)}, best = ${fmt(report.rounding.best)}\n` +
      `exact ${model} = ${exact === null || exact === undefined ? "n/a" : fmt(exact)}</pre>` +
      `<table>${rows}</table>`;
  }, 10);
}

function drawHistogram() {
  $("hist-err").textContent = "";
  let h;
  try {
    h = JSON.parse(
      roundingHistogram(
        $("hist-spec").value.trim(),
        $("hist-model").value,
        Number($("hist-trials").value),
        Number($("hist-seed").value),
        40,
      ),
    );
  } catch (e) {
    $("hist-err").textContent = e.message ?? String(e);
    return;
  }
  const canvas = $("hist");
  const ctx = canvas.getContext("2d");
  const { width: w, height: hgt } = canvas;
  const pad = 30;
  axes(ctx, w, hgt, pad);
  const maxCount = Math.max(...h.counts, 1);
  const bw = (w - 2 * pad) / h.counts.length;
  ctx.fillStyle = "#8ab";
  h.counts.forEach((c, i) => {
    const bh = (c / maxCount) * (hgt - 2 * pad);
    ctx.fillRect(pad + i * bw + 1, hgt - pad - bh, bw - 2, bh);
  });
  const px = (e) => pad + ((e - h.lo) / (h.hi - h.lo)) * (w - 2 * pad);
  for (const [value, color] of [[h.bound, "#c00"], [h.mean, "#03c"]]) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(px(value), pad);
    ctx.lineTo(px(value), hgt - pad);
    ctx.stroke();
  }
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.fillText(fmt(h.lo), pad, hgt - 10);
  ctx.fillText(fmt(h.hi), w - pad - 60, hgt - 10);
  $("hist-info").textContent =
    `m = ${h.m}\nbound = ${fmt(h.bound)}\nmean  = ${fmt(h.mean)}\nexact = ${fmt(h.exact)}`;
}

await init();
$("curve-go").addEventListener("click", plotCurve);
$("rep-go").addEventListener("click", runReport);
$("hist-go").addEventListener("click", drawHistogram);
plotCurve();
