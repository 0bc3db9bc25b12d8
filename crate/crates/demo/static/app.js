import init, { presets, demo_lower_bound, demo_strip_curve, demo_count_grid } from "./pkg/capbound_demo.js";

const $ = (id) => document.getElementById(id);

function fillPresets(sel) {
  for (const t of JSON.parse(presets())) {
    const o = document.createElement("option");
    o.textContent = t;
    sel.appendChild(o);
  }
}

function busy(btn, fn) {
  btn.disabled = true;
  // let the browser paint the disabled state before the compute blocks
  setTimeout(() => {
    try { fn(); } finally { btn.disabled = false; }
  }, 20);
}

function renderLower() {
  const out = $("lb-out");
  const res = JSON.parse(demo_lower_bound(
    $("lb-preset").value,
    +$("lb-delta").value, +$("lb-mu").value, +$("lb-alpha").value,
    +$("lb-p").value, +$("lb-q").value,
    $("lb-phi").value));
  if (res.error) { out.innerHTML = `<span class="err">${res.error}</span>`; return; }
  lastLower = res.bound;
  const certs = res.certificates.map(c =>
    `<tr><td>${c.n}</td><td>${c.lambda.toPrecision(12)}</td><td>${c.iters}</td></tr>`).join("");
  out.innerHTML = `
    <div class="big">cap &ge; ${res.bound.toFixed(10)}</div>
    <div>${res.method}, widths ${res.params.widths.join(" / ")}, ${res.runtime_ms} ms</div>
    <table><tr><th>width</th><th>&lambda;</th><th>iterations</th></tr>${certs}</table>`;
}

let lastLower = null;

function renderCurve() {
  const res = JSON.parse(demo_strip_curve($("sc-preset").value, +$("sc-n").value));
  const out = $("sc-out");
  if (res.error) { out.innerHTML = `<span class="err">${res.error}</span>`; return; }
  const pts = res.points;
  out.textContent = pts.map(p => `V${p.n}: ${p.upper.toFixed(6)}`).join("   ");
  const cv = $("sc-canvas"), ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const ys = pts.map(p => p.upper);
  let lo = Math.min(...ys), hi = Math.max(...ys);
  if (lastLower !== null) lo = Math.min(lo, lastLower);
  const pad = (hi - lo) * 0.15 + 1e-6;
  lo -= pad; hi += pad;
  const X = n => 50 + (n - 1) / Math.max(pts.length - 1, 1) * (cv.width - 90);
  const Y = v => cv.height - 24 - (v - lo) / (hi - lo) * (cv.height - 48);
  ctx.strokeStyle = "#2563eb";
  ctx.lineWidth = 2;
  ctx.beginPath();
  pts.forEach((p, i) => i ? ctx.lineTo(X(p.n), Y(p.upper)) : ctx.moveTo(X(p.n), Y(p.upper)));
  ctx.stroke();
  ctx.fillStyle = "#2563eb";
  for (const p of pts) { ctx.beginPath(); ctx.arc(X(p.n), Y(p.upper), 3.5, 0, 7); ctx.fill(); }
  ctx.fillStyle = "#5b6676";
  ctx.font = "12px system-ui";
  for (const p of pts) ctx.fillText(`n=${p.n}`, X(p.n) - 10, cv.height - 6);
  if (lastLower !== null) {
    ctx.strokeStyle = "#16a34a";
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(50, Y(lastLower));
    ctx.lineTo(cv.width - 40, Y(lastLower));
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#16a34a";
    ctx.fillText(`lower ${lastLower.toFixed(6)}`, 54, Y(lastLower) - 5);
  }
}

function renderGrid() {
  const res = JSON.parse(demo_count_grid($("ct-preset").value, +$("ct-m").value, +$("ct-n").value));
  const out = $("ct-out");
  if (res.error) { out.innerHTML = `<span class="err">${res.error}</span>`; return; }
  const maxM = Math.max(...res.cells.map(c => c.m));
  const maxN = Math.max(...res.cells.map(c => c.n));
  let html = "<table><tr><th>m \\ n</th>";
  for (let n = 1; n <= maxN; n++) html += `<th>${n}</th>`;
  html += "</tr>";
  for (let m = 1; m <= maxM; m++) {
    html += `<tr><th>${m}</th>`;
    for (let n = 1; n <= maxN; n++) {
      const c = res.cells.find(c => c.m === m && c.n === n);
      html += `<td>${c.count}<br><small>${c.rate.toFixed(4)}</small></td>`;
    }
    html += "</tr>";
  }
  out.innerHTML = html + "</table>";
}

init().then(() => {
  for (const id of ["lb-preset", "sc-preset", "ct-preset"]) fillPresets($(id));
  $("lb-run").onclick = () => busy($("lb-run"), renderLower);
  $("sc-run").onclick = () => busy($("sc-run"), renderCurve);
  $("ct-run").onclick = () => busy($("ct-run"), renderGrid);
});
