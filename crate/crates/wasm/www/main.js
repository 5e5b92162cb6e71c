import init, { Sweep, sample_graph, metric_landscape } from "./pkg/geoentropy_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const seed = (id) => BigInt(Math.max(0, Math.floor(num(id))));

function axes(ctx, w, h, pad, xr, yr, xlabel, ylabel) {
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.strokeRect(pad, pad / 2, w - 1.5 * pad, h - 1.5 * pad);
  ctx.font = "12px sans-serif";
  ctx.textAlign = "center";
  for (let i = 0; i <= 5; i++) {
    const t = i / 5;
    const x = pad + t * (w - 1.5 * pad);
    ctx.fillText((xr[0] + t * (xr[1] - xr[0])).toFixed(2), x, h - pad + 16);
  }
  ctx.textAlign = "right";
  for (let i = 0; i <= 4; i++) {
    const t = i / 4;
    const y = h - pad - t * (h - 1.5 * pad);
    ctx.fillText((yr[0] + t * (yr[1] - yr[0])).toFixed(2), pad - 6, y + 4);
  }
  ctx.textAlign = "center";
  ctx.fillText(xlabel, w / 2, h - 4);
  ctx.save();
  ctx.translate(12, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
}

// Sweep panel: one row per animation frame so the curve grows live.
let running = null;

function drawCurve(sweep, n) {
  const c = $("sw-canvas");
  const ctx = c.getContext("2d");
  const w = c.width, h = c.height, pad = 50;
  ctx.clearRect(0, 0, w, h);
  const x = sweep.x(), m = sweep.mean(), se = sweep.stderr(), giant = sweep.giant();
  const xmax = Math.max(num("sw-kmax"), 0.1);
  let ymax = 0.05;
  m.forEach((v, i) => { if (Number.isFinite(v)) ymax = Math.max(ymax, v + se[i]); });
  axes(ctx, w, h, pad, [0, xmax], [0, ymax], "k / n", "normalized entropy");
  const px = (v) => pad + (v / xmax) * (w - 1.5 * pad);
  const py = (v) => h - pad - (v / ymax) * (h - 1.5 * pad);

  // Giant component fraction on the same vertical extent, scaled to [0, 1].
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  giant.forEach((g, i) => {
    const y = h - pad - g * (h - 1.5 * pad);
    i ? ctx.lineTo(px(x[i]), y) : ctx.moveTo(px(x[i]), y);
  });
  ctx.stroke();

  ctx.strokeStyle = "#1f5fa8";
  ctx.fillStyle = "#1f5fa8";
  ctx.beginPath();
  let started = false;
  m.forEach((v, i) => {
    if (!Number.isFinite(v)) return;
    started ? ctx.lineTo(px(x[i]), py(v)) : ctx.moveTo(px(x[i]), py(v));
    started = true;
  });
  ctx.stroke();
  m.forEach((v, i) => {
    if (!Number.isFinite(v)) return;
    ctx.fillRect(px(x[i]) - 2, py(v) - 2, 4, 4);
    ctx.beginPath();
    ctx.moveTo(px(x[i]), py(v - se[i]));
    ctx.lineTo(px(x[i]), py(v + se[i]));
    ctx.stroke();
  });

  const [xs, slope] = sweep.knee(3);
  let text = `${sweep.x().length} / ${sweep.total()} rows, n = ${n}`;
  if (Number.isFinite(xs)) {
    ctx.strokeStyle = "#c33";
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(px(xs), pad / 2);
    ctx.lineTo(px(xs), h - pad);
    ctx.stroke();
    ctx.setLineDash([]);
    text += `, knee at k/n = ${xs.toFixed(3)} (slope ${slope.toFixed(3)})`;
  } else if (Number.isFinite(slope)) {
    text += `, no knee resolved (max slope ${slope.toFixed(3)})`;
  }
  $("sw-status").textContent = text + "; grey: giant component fraction";
}

function runSweep() {
  stopSweep();
  const n = Math.floor(num("sw-n"));
  let sweep;
  try {
    sweep = new Sweep(n, Math.floor(num("sw-kmax") * n), Math.floor(num("sw-kstep")), num("sw-r"),
      $("sw-coupled").checked, Math.floor(num("sw-samples")), Math.floor(num("sw-reals")), seed("sw-seed"));
  } catch (e) {
    $("sw-status").textContent = String(e.message ?? e);
    return;
  }
  const token = {};
  running = token;
  const tick = () => {
    if (running !== token) return;
    try {
      if (!sweep.step()) { running = null; sweep.free(); return; }
    } catch (e) {
      $("sw-status").textContent = String(e.message ?? e);
      running = null;
      return;
    }
    drawCurve(sweep, n);
    requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
}

function stopSweep() { running = null; }

// Graph panel: vertices on a circle, coloured by component.
function drawGraph() {
  let g;
  try {
    g = sample_graph(Math.floor(num("g-n")), Math.floor(num("g-k")), seed("g-seed"));
  } catch (e) {
    $("g-status").textContent = String(e.message ?? e);
    return;
  }
  const c = $("g-canvas");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const n = g.n(), edges = g.edges(), comp = g.component_of(), sizes = g.component_sizes();
  g.free();
  const cx = c.width / 2, cy = c.height / 2, rad = Math.min(cx, cy) - 20;
  // Place vertices grouped by component so clusters stay contiguous.
  const order = Array.from({ length: n }, (_, i) => i).sort((a, b) => comp[a] - comp[b] || a - b);
  const pos = new Array(n);
  order.forEach((v, i) => {
    const a = (2 * Math.PI * i) / Math.max(n, 1);
    pos[v] = [cx + rad * Math.cos(a), cy + rad * Math.sin(a)];
  });
  const colour = (ci) => (sizes[ci] === 1 ? "#aaa" : `hsl(${(ci * 137.5) % 360},65%,45%)`);
  ctx.globalAlpha = 0.6;
  for (let e = 0; e < edges.length; e += 2) {
    const [a, b] = [edges[e], edges[e + 1]];
    ctx.strokeStyle = colour(comp[a]);
    ctx.beginPath();
    ctx.moveTo(...pos[a]);
    ctx.lineTo(...pos[b]);
    ctx.stroke();
  }
  ctx.globalAlpha = 1;
  for (let v = 0; v < n; v++) {
    ctx.fillStyle = colour(comp[v]);
    ctx.beginPath();
    ctx.arc(pos[v][0], pos[v][1], 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  const isolated = Array.from(sizes).filter((s) => s === 1).length;
  $("g-status").textContent =
    `${sizes.length} components, largest ${sizes[0] ?? 0} of ${n} (${((sizes[0] ?? 0) / Math.max(n, 1)).toFixed(2)}), ${isolated} isolated`;
}

// Metric panel: log10 of the volume density over a log-spaced theta grid.
function colourMap(t) {
  const stops = [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]];
  const s = Math.min(Math.max(t, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(s), stops.length - 2), f = s - i;
  return stops[i].map((v, j) => Math.round(v + f * (stops[i + 1][j] - v)));
}

function drawMetric() {
  const res = Math.floor(num("m-res"));
  let v;
  try {
    v = metric_landscape(num("m-w"), num("m-lo"), num("m-hi"), res);
  } catch (e) {
    $("m-status").textContent = String(e.message ?? e);
    return;
  }
  const finite = Array.from(v).filter(Number.isFinite).sort((a, b) => a - b);
  const lo = finite[Math.floor(0.02 * (finite.length - 1))] ?? 0;
  const hi = finite[Math.floor(0.98 * (finite.length - 1))] ?? 1;
  const img = new ImageData(res, res);
  for (let i = 0; i < res; i++) {
    for (let j = 0; j < res; j++) {
      const val = v[i * res + j];
      // Row 0 is the smallest theta_2; draw it at the bottom.
      const p = 4 * ((res - 1 - i) * res + j);
      const [r, g, b] = Number.isFinite(val) ? colourMap((val - lo) / (hi - lo || 1)) : [255, 255, 255];
      img.data.set([r, g, b, 255], p);
    }
  }
  const c = $("m-canvas");
  const off = new OffscreenCanvas(res, res);
  off.getContext("2d").putImageData(img, 0, 0);
  const ctx = c.getContext("2d");
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, c.width, c.height);
  ctx.drawImage(off, 0, 0, c.width, c.height);
  $("m-status").textContent =
    `log10 density from ${lo.toFixed(2)} (dark) to ${hi.toFixed(2)} (bright); white marks singular points; both axes log scale`;
}

await init();
$("sw-run").onclick = runSweep;
$("sw-stop").onclick = stopSweep;
$("g-draw").onclick = drawGraph;
$("m-draw").onclick = drawMetric;
drawGraph();
drawMetric();
