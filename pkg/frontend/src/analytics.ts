/**
 * Analytics panel: the service's findings, verbatim, grouped by check.
 */
import { FindingView } from "./api.js";
import { el } from "./dom.js";

export function renderFindings(findings: FindingView[], rendered: string[]): HTMLElement {
  const panel = el("div", { class: "analytics-panel" }, [
    el("h2", {}, ["Errors and warnings"]),
  ]);
  if (!findings.length) {
    panel.append(el("p", { class: "all-clear" }, ["No findings."]));
    return panel;
  }
  const groups = new Map<string, FindingView[]>();
  for (const finding of findings) {
    const bucket = groups.get(finding.code) ?? [];
    bucket.push(finding);
    groups.set(finding.code, bucket);
  }
  for (const [code, bucket] of groups) {
    const section = el("div", { class: `finding-group ${bucket[0].severity}` }, [
      el("h3", {}, [code]),
    ]);
    for (const finding of bucket) {
      section.append(
        el("div", { class: "finding", "data-target": finding.target }, [
          el("span", { class: "finding-target" }, [finding.target]),
          el("p", { class: "finding-message" }, [finding.message]),
        ]),
      );
    }
    panel.append(section);
  }
  const raw = el("details", {}, [el("summary", {}, ["raw findings"])]);
  raw.append(el("pre", { class: "rendered-findings" }, [rendered.join("\n")]));
  panel.append(raw);
  return panel;
}
