// New-goals page: renders the proposal table with the Goal / Sub-goal /
// Indicator / Source / Description columns.

import { httpFetcher, loadManifest, loadNewGoals } from "./bundle.js";

export async function startNewGoalsPage(): Promise<void> {
  let fetcher = httpFetcher("bundle");
  try {
    await loadManifest(fetcher);
  } catch {
    fetcher = httpFetcher("bundle/preliminary");
    await loadManifest(fetcher);
  }
  const doc = await loadNewGoals(fetcher);
  const body = document.getElementById("new-goals-body") as HTMLElement;
  document.getElementById("dataset-name")!.textContent = doc.dataset;

  if (doc.rows.length === 0) {
    body.innerHTML = "<tr><td colspan='5' class='hint'>No proposals in this bundle.</td></tr>";
    return;
  }
  body.replaceChildren(...doc.rows.map((row) => {
    const tr = document.createElement("tr");
    const subGoals = row.sub_goals
      .map((s) => `<p><strong>${s.code}</strong> ${s.description}</p>`)
      .join("");
    const indicators = row.sub_goals
      .flatMap((s) => s.indicators)
      .map((i) => `<p><strong>${i.code}</strong> ${i.description}</p>`)
      .join("");
    tr.innerHTML = `
      <td class="goal-cell">${row.goal}</td>
      <td>${subGoals}</td>
      <td>${indicators}</td>
      <td>${row.source_label}</td>
      <td>${row.description}</td>`;
    return tr;
  }));
}

startNewGoalsPage().catch((err) => {
  const body = document.getElementById("new-goals-body");
  if (body) body.textContent = String(err);
});
