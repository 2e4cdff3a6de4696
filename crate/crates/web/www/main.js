import init, { convergence, scaling, curves } from "./pkg/bgc_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// series: [{xs, ys, color, label}]; axes in whatever units the caller passes
function plot(canvas, series, xlabel, ylabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, m = 48;
  ctx.clearRect(0, 0, w, h);
  const all = (k) => series.flatMap((s) => s[k]).filter(Number.isFinite);
  let [x0, x1] = [Math.min(...all("xs")), Math.max(...all("xs"))];
  let [y0, y1] = [Math.min(...all("ys")), Math.max(...all("ys"))];
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const pad = 0.05 * (y1 - y0);
  y0 -= pad; y1 += pad;
  const sx = (x) => m + (x - x0) / (x1 - x0) * (w - 2 * m);
  const sy = (y) => h - m + (y0 - y) / (y1 - y0) * (h - 2 * m);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(m, m / 2, w - 2 * m, h - 1.5 * m);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText(x0.toPrecision(3), m, h - m + 16);
  ctx.fillText(x1.toPrecision(3), w - m - 30, h - m + 16);
  ctx.fillText(y1.toPrecision(4), 2, m / 2 + 10);
  ctx.fillText(y0.toPrecision(4), 2, h - m);
  ctx.fillText(xlabel, w / 2 - 20, h - 8);
  ctx.fillText(ylabel, m + 6, m / 2 + 14);

  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dashed ? [6, 4] : []);
    ctx.beginPath();
    s.xs.forEach((x, j) => {
      const px = sx(x), py = sy(s.ys[j]);
      j ? ctx.lineTo(px, py) : ctx.moveTo(px, py);
    });
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - m - 180, m / 2 + 16 + 14 * i);
  });
  ctx.setLineDash([]);
}

function guarded(outId, f) {
  try {
    $(outId).classList.remove("err");
    f();
  } catch (e) {
    $(outId).classList.add("err");
    $(outId).textContent = String(e);
  }
}

function runConvergence() {
  guarded("conv-out", () => {
    const r = JSON.parse(convergence(num("conv-tau"), num("conv-s"), num("conv-p"), num("conv-stop"), 25));
    const lb = r.betas.map(Math.log10);
    plot($("conv-plot"), [
      { xs: lb, ys: r.ratios, color: "#1f6fb2", label: "ratio" },
      { xs: lb, ys: r.ratios.map(() => r.target), color: "#c0392b", label: "|det K|^(1-p)", dashed: true },
    ], "log10 beta", "ratio");
    const last = r.rel_errors.length - 1;
    $("conv-out").textContent =
      `target ${r.target}   ||Phi||_pp ${r.norm}\n` +
      `beta ${r.betas[last].toExponential(3)}: ratio ${r.ratios[last]}, rel error ${r.rel_errors[last].toExponential(3)}`;
  });
}

function runScaling() {
  guarded("scal-out", () => {
    const q = num("scal-q");
    const r = JSON.parse(scaling(num("scal-s"), num("scal-p"), Number.isFinite(q) ? q : undefined));
    const lb = r.betas.map(Math.log);
    const b = r.log_norms[0] - r.slope * lb[0];
    plot($("scal-plot"), [
      { xs: lb, ys: r.log_norms, color: "#1f6fb2", label: "log ||rho||_p" },
      { xs: lb, ys: lb.map((x) => b + r.slope * x), color: "#27ae60", label: "fit", dashed: true },
    ], "log beta", "log norm");
    let text = `fitted ${r.slope.toFixed(5)}   expected ${r.expected.toFixed(5)}`;
    if (r.divergence) text += `\nq->p slope ${r.divergence[0].toFixed(5)}: ${r.divergence[1]}`;
    $("scal-out").textContent = text;
  });
}

function runCurves() {
  guarded("curv-out", () => {
    const r = JSON.parse(curves(num("curv-p"), num("curv-dmax"), 200));
    plot($("curv-plot"), [
      { xs: r.d, ys: r.f.map(Math.log), color: "#1f6fb2", label: "log f_p(d)" },
      { xs: r.d, ys: r.dg, color: "#8e44ad", label: "d g_p(d)" },
      { xs: r.d, ys: r.d, color: "#aaa", label: "d", dashed: true },
    ], "d", "");
    const i = r.d.length - 1;
    $("curv-out").textContent = `d = ${r.d[i]}: f_p = ${r.f[i].toPrecision(8)}, d g_p = ${r.dg[i].toPrecision(8)}`;
  });
}

await init();
for (const [prefix, run] of [["conv", runConvergence], ["scal", runScaling], ["curv", runCurves]]) {
  document.querySelectorAll(`#${prefix} input`).forEach((el) => el.addEventListener("input", run));
  run();
}
