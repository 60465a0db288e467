// Generated by `wasm-bindgen --target web --out-dir www/pkg`; see the README.
import init, { workMap, efficiencyDistribution, turCurve, observables } from "./pkg/idle_otto_web.js";

const REGIME_COLORS = ["#2b8cbe", "#7bccc4", "#f03b20", "#feb24c", "#a1a1a1", "#ffffff"];
const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function cycle() {
  return { j: num("J"), hi: num("hi"), hf: num("hf") };
}

function fmt(x) {
  if (x === null || x === undefined) return "undefined";
  if (x === 0 || !Number.isFinite(x)) return String(x);
  const a = Math.abs(x);
  return a >= 1e-3 && a < 1e5 ? x.toFixed(5) : x.toExponential(4);
}

function report(el, fn) {
  try {
    fn();
    el.classList.remove("error");
  } catch (e) {
    el.textContent = String(e);
    el.classList.add("error");
  }
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

// Linear plot frame with a left and bottom margin.
function frame(canvas, xs, ys, xlabel, ylabel, xlog = false) {
  const ctx = clear(canvas);
  const m = { l: 48, r: 10, t: 10, b: 34 };
  const w = canvas.width - m.l - m.r;
  const h = canvas.height - m.t - m.b;
  const tx = xlog ? Math.log10 : (v) => v;
  let [x0, x1] = [Math.min(...xs.map(tx)), Math.max(...xs.map(tx))];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (x0 === x1) { x0 -= 0.5; x1 += 0.5; }
  if (y0 === y1) { y0 -= 0.5; y1 += 0.5; }
  const pad = 0.05 * (y1 - y0);
  y0 -= pad; y1 += pad;
  const px = (v) => m.l + ((tx(v) - x0) / (x1 - x0)) * w;
  const py = (v) => m.t + (1 - (v - y0) / (y1 - y0)) * h;
  ctx.strokeStyle = "#888";
  ctx.strokeRect(m.l, m.t, w, h);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  for (let k = 0; k <= 4; k++) {
    const xv = x0 + (k / 4) * (x1 - x0);
    const label = xlog ? (10 ** xv).toPrecision(2) : xv.toPrecision(3);
    ctx.fillText(label, m.l + (k / 4) * w, m.t + h + 14);
  }
  ctx.fillText(xlabel, m.l + w / 2, canvas.height - 4);
  ctx.textAlign = "right";
  for (let k = 0; k <= 4; k++) {
    const yv = y0 + (k / 4) * (y1 - y0);
    ctx.fillText(yv.toPrecision(3), m.l - 4, m.t + (1 - k / 4) * h + 4);
  }
  ctx.save();
  ctx.translate(12, m.t + h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.textAlign = "center";
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  return { ctx, px, py, y0 };
}

let lastMap = null;

function drawMap() {
  const { j, hi, hf } = cycle();
  const n = Math.round(num("mapPoints"));
  const tMax = num("mapMax");
  report($("mapReadout"), () => {
    const map = JSON.parse(workMap(j, hi, hf, 0.01, tMax, n));
    lastMap = map;
    const canvas = $("map");
    const ctx = clear(canvas);
    const cell = canvas.width / n;
    const peak = Math.max(...map.mean_w.map(Math.abs)) || 1;
    const shade = $("mapShade").checked;
    // Rows are Tc (x axis), columns Th (y axis, upwards).
    for (let a = 0; a < n; a++) {
      for (let b = 0; b < n; b++) {
        const k = a * n + b;
        ctx.globalAlpha = shade ? 0.25 + 0.75 * Math.sqrt(Math.abs(map.mean_w[k]) / peak) : 1;
        ctx.fillStyle = REGIME_COLORS[map.regime[k]];
        ctx.fillRect(a * cell, canvas.height - (b + 1) * cell, Math.ceil(cell), Math.ceil(cell));
      }
    }
    ctx.globalAlpha = 1;
    $("mapLegend").innerHTML = map.regime_names
      .map((name, k) => `<span><i style="background:${REGIME_COLORS[k]};border:1px solid #999"></i>${name}</span>`)
      .join("");
    $("mapReadout").textContent = `x: Tc in [0.01, ${tMax}], y: Th in [0.01, ${tMax}]. Click a cell to inspect it.`;
  });
}

function inspectMap(event) {
  if (!lastMap) return;
  const canvas = $("map");
  const rect = canvas.getBoundingClientRect();
  const fx = (event.clientX - rect.left) / rect.width;
  const fy = 1 - (event.clientY - rect.top) / rect.height;
  const t = (f) => lastMap.t_min + Math.min(Math.max(f, 0), 1) * (lastMap.t_max - lastMap.t_min);
  const { j, hi, hf } = cycle();
  const [tc, th] = [t(fx), t(fy)];
  report($("mapReadout"), () => {
    const o = JSON.parse(observables(j, hi, hf, tc, th));
    $("mapReadout").textContent =
      `Tc=${fmt(tc)} Th=${fmt(th)}  regime: ${o.regime}\n` +
      `<W>=${fmt(o.mean_w)}  var W=${fmt(o.var_w)}  eta_th=${fmt(o.eta_th)}\n` +
      `eta_0=${fmt(o.eta_0)}  eta_C=${fmt(o.eta_c)}  <Sigma>=${fmt(o.mean_sigma)}`;
  });
}

function drawEfficiency() {
  const { j, hi, hf } = cycle();
  report($("effReadout"), () => {
    const d = JSON.parse(efficiencyDistribution(j, hi, hf, num("effTc"), num("effTh")));
    const xs = d.eta_scaled.value;
    const ps = d.eta_scaled.probability;
    const refs = [d.eta_0, d.eta_c].concat(d.eta_th === null ? [] : [d.eta_th]);
    const { ctx, px, py, y0 } = frame($("eff"), xs.concat(refs), ps.concat([0]), "scaled efficiency", "probability");
    ctx.strokeStyle = "#2b8cbe";
    ctx.lineWidth = 3;
    xs.forEach((x, k) => {
      ctx.beginPath();
      ctx.moveTo(px(x), py(Math.max(y0, 0)));
      ctx.lineTo(px(x), py(ps[k]));
      ctx.stroke();
    });
    ctx.lineWidth = 1;
    const mark = (x, color, label) => {
      ctx.strokeStyle = color;
      ctx.setLineDash([4, 3]);
      ctx.beginPath();
      ctx.moveTo(px(x), 10);
      ctx.lineTo(px(x), $("eff").height - 34);
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.fillStyle = color;
      ctx.textAlign = "left";
      ctx.fillText(label, px(x) + 3, 22);
    };
    mark(d.eta_c, "#f03b20", "η_C");
    if (d.eta_th !== null) mark(d.eta_th, "#31a354", "η_th");
    $("effReadout").textContent =
      `regime: ${d.regime}   η_th=${fmt(d.eta_th)}  η_0=${fmt(d.eta_0)}  η_C=${fmt(d.eta_c)}\n` +
      `P(η' > η_C) = ${fmt(xs.reduce((s, x, k) => s + (x > d.eta_c ? ps[k] : 0), 0))}`;
  });
}

function drawTur() {
  const { j, hi, hf } = cycle();
  report($("turReadout"), () => {
    const c = JSON.parse(turCurve(j, hi, hf, num("turTh"), num("turMin"), num("turMax"), 300));
    const keep = c.t_cold.map((_, k) => c.observed[k] !== null && Number.isFinite(c.bound[k]));
    const xs = c.t_cold.filter((_, k) => keep[k]);
    const obs = c.observed.filter((_, k) => keep[k]).map(Math.log10);
    const bnd = c.bound.filter((_, k) => keep[k]).map((b) => Math.log10(Math.max(b, 1e-300)));
    if (xs.length === 0) throw new Error("mean work vanishes everywhere on this line");
    const floor = Math.min(...obs) - 3;
    const clipped = bnd.map((b) => Math.max(b, floor));
    const { ctx, px, py } = frame($("tur"), xs, obs.concat(clipped), "Tc (log)", "log10 of var W / <W>^2", true);
    const line = (ys, color) => {
      ctx.strokeStyle = color;
      ctx.beginPath();
      xs.forEach((x, k) => (k ? ctx.lineTo(px(x), py(ys[k])) : ctx.moveTo(px(x), py(ys[k]))));
      ctx.stroke();
    };
    line(obs, "#2b8cbe");
    line(clipped, "#f03b20");
    const margin = Math.min(...obs.map((o, k) => o - bnd[k]));
    $("turReadout").textContent =
      `blue: observed relative fluctuation, red: lower bound from mean entropy production\n` +
      `smallest gap: ${fmt(margin)} decades over ${xs.length} points`;
  });
}

function drawAll() {
  drawMap();
  drawEfficiency();
  drawTur();
}

await init();
for (const id of ["J", "hi", "hf"]) $(id).addEventListener("change", drawAll);
for (const id of ["mapMax", "mapPoints", "mapShade"]) $(id).addEventListener("change", drawMap);
for (const id of ["effTc", "effTh"]) $(id).addEventListener("change", drawEfficiency);
for (const id of ["turTh", "turMin", "turMax"]) $(id).addEventListener("change", drawTur);
$("map").addEventListener("click", inspectMap);
drawAll();
