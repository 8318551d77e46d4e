import init, { rate_curve, delay_bound_curve, power_sweep } from "./pkg/noma_effrate_web.js";

const COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const num = (id) => Number(document.getElementById(id).value);
const status = document.getElementById("status");

function plot(canvasId, legendId, curve, { logY = false, xLabel = "", mark = null } = {}) {
  const canvas = document.getElementById(canvasId);
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = 45;
  const xs = Array.from(curve.x());
  const names = curve.names();
  const cols = names.map((_, i) => Array.from(curve.column(i)).map((v) => (logY ? (v > 0 ? Math.log10(v) : NaN) : v)));
  const finite = cols.flat().filter(Number.isFinite);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...finite), Math.max(...finite)];
  if (y0 === y1) y1 = y0 + 1;
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (width - 2 * pad);
  const py = (y) => height - pad - ((y - y0) / (y1 - y0)) * (height - 2 * pad);

  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#000";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, height - pad);
  ctx.lineTo(width - pad, height - pad);
  ctx.stroke();
  ctx.fillStyle = "#000";
  ctx.font = "12px sans-serif";
  ctx.fillText(String(x0), pad, height - pad + 15);
  ctx.fillText(String(x1), width - pad - 20, height - pad + 15);
  ctx.fillText(xLabel, width / 2, height - 10);
  const fmt = (y) => (logY ? `1e${y.toFixed(1)}` : y.toFixed(2));
  ctx.fillText(fmt(y1), 2, pad + 4);
  ctx.fillText(fmt(y0), 2, height - pad);

  cols.forEach((col, i) => {
    ctx.strokeStyle = COLOURS[i % COLOURS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let started = false;
    col.forEach((y, k) => {
      if (!Number.isFinite(y)) return;
      if (started) ctx.lineTo(px(xs[k]), py(y));
      else ctx.moveTo(px(xs[k]), py(y));
      started = true;
    });
    ctx.stroke();
  });
  if (mark) {
    ctx.fillStyle = "#d62728";
    ctx.beginPath();
    ctx.arc(px(mark[0]), py(mark[1]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  document.getElementById(legendId).innerHTML = names
    .map((n, i) => `<span style="color:${COLOURS[i % COLOURS.length]}">■ ${n}</span>`)
    .join("");
}

function guarded(fn) {
  return () => {
    status.textContent = "";
    try {
      fn();
    } catch (e) {
      status.textContent = String(e.message ?? e);
    }
  };
}

const runRate = guarded(() => {
  const curve = rate_curve(num("alpha"), num("mu"), num("omega_w2"), num("a_s"), num("theta"), -10, 40, 2);
  plot("rate", "rate-legend", curve, { xLabel: "ρ (dB)" });
});

const runBound = guarded(() => {
  const curve = delay_bound_curve(num("alpha"), num("mu"), num("omega_w2"), num("a_s"), num("rho"), num("n"), num("load"), 30);
  plot("bound", "bound-legend", curve, { logY: true, xLabel: "delay (slots)" });
});

const runPower = guarded(() => {
  const curve = power_sweep(num("alpha"), num("mu"), num("omega_w2"), num("theta"), num("rho"));
  const xs = Array.from(curve.x());
  const sums = Array.from(curve.column(0));
  const best = sums.indexOf(Math.max(...sums));
  plot("power", "power-legend", curve, { xLabel: "a_s", mark: [xs[best], sums[best]] });
  status.textContent = `best a_s = ${xs[best]} (sum ${sums[best].toFixed(4)} bits/channel use)`;
});

await init();
document.getElementById("run-rate").addEventListener("click", runRate);
document.getElementById("run-bound").addEventListener("click", runBound);
document.getElementById("run-power").addEventListener("click", runPower);
runRate();
