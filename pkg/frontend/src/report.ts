/**
 * Report editor: sections with locked probability tokens, free prose
 * editing, anchor navigation into the appendix, print-ready export.
 *
 * The editable text is the section template with `{prob:...}`
 * placeholders visible; the rendered text substitutes the service's
 * phrases. Dropping a placeholder is refused server-side (409); the
 * view surfaces that explanation instead of applying the edit.
 */
import { ReportView } from "./api.js";
import { clear, el } from "./dom.js";

export interface ReportCallbacks {
  onEdit(sectionId: string, text: string): Promise<string | null>;
  onExport(): Promise<void>;
}

export function renderReport(report: ReportView, callbacks: ReportCallbacks): HTMLElement {
  const root = el("div", { class: "report-view" });
  root.append(el("h2", {}, [report.question]));
  const exportButton = el("button", { class: "print-export" }, ["Print-ready export"]);
  exportButton.addEventListener("click", () => void callbacks.onExport());
  root.append(exportButton);

  let paragraph = 0;
  for (const section of report.sections) {
    paragraph += 1;
    const container = el("div", {
      class: `report-section report-${section.kind}`,
      "data-section": section.id,
    });
    container.append(el("h3", {}, [`Paragraph ${paragraph}`]));
    container.append(el("p", { class: "section-text" }, [section.text]));

    if (Object.keys(section.tokens).length) {
      const tokens = el("p", { class: "locked-tokens" }, [
        "Locked probability tokens: ",
        Object.entries(section.tokens)
          .map(([placeholder, phrase]) => `${placeholder} = ${phrase}`)
          .join("; "),
      ]);
      container.append(tokens);
    }

    const editor = el("textarea", { class: "section-editor" }, [section.template]);
    const save = el("button", { class: "save-section" }, ["Save prose"]);
    const error = el("p", { class: "edit-error" });
    save.addEventListener("click", async () => {
      const refused = await callbacks.onEdit(section.id, (editor as HTMLTextAreaElement).value);
      clear(error);
      if (refused) error.append(refused);
    });
    container.append(editor, save, error);

    if (section.fragment_id) {
      const anchor = el(
        "a",
        { class: "fragment-anchor", href: `#${section.fragment_id}` },
        [`Figure for Paragraph ${paragraph}`],
      );
      container.append(anchor);
    }
    for (const eid of section.evidence_ids) {
      container.append(
        el("a", { class: "evidence-anchor", href: `#evidence-${eid}` }, [
          ` Evidence ${eid}`,
        ]),
      );
    }
    root.append(container);
  }

  const appendix = el("div", { class: "appendix" }, [el("h3", {}, ["Appendix"])]);
  for (const entry of report.evidence) {
    appendix.append(
      el("div", { class: "appendix-evidence", id: entry.id }, [
        el("h4", {}, [`${entry.tag} ${entry.name}`]),
        el("p", {}, [entry.body]),
        el("p", { class: "evidence-meta" }, [
          [
            entry.source_kind ? `source: ${entry.source_kind}` : null,
            entry.credibility ? `credibility: ${entry.credibility}` : null,
            entry.justification ? `justification: ${entry.justification}` : null,
          ]
            .filter(Boolean)
            .join("; "),
        ]),
      ]),
    );
  }
  for (const fragment of report.fragments) {
    appendix.append(
      el("div", { class: "appendix-fragment", id: fragment.id }, [
        el("h4", {}, [fragment.title]),
        el("pre", {}, [fragment.lines.join("\n")]),
      ]),
    );
  }
  root.append(appendix);
  return root;
}
