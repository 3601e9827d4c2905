/** Toolbar of ad hoc tools created from previous prompts. An armed slotted
 * tool shows its label with the slots filled so far. */

import type { ToolView } from "./types.js";
import type { ViewState } from "./state.js";

/** Fill "?" slots left to right with the displays gathered so far. */
export function partialLabel(label: string, displays: string[]): string {
  let index = 0;
  return label.replace(/\?/g, (slot) => {
    const filled = displays[index];
    index += 1;
    return filled !== undefined ? filled : slot;
  });
}

export class Toolbar {
  readonly root: HTMLElement;

  constructor(private readonly onToggle: (tool: ToolView) => void) {
    this.root = document.createElement("div");
    this.root.className = "toolbar";
  }

  render(state: ViewState): void {
    this.root.textContent = "";
    const tools = state.session?.toolbar ?? [];
    for (const tool of tools) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "tool";
      button.dataset.toolId = tool.id;
      button.dataset.kind = tool.kind;
      const armed = state.armedTool !== null && state.armedTool.tool.id === tool.id;
      if (armed) button.classList.add("armed");
      button.textContent = armed
        ? partialLabel(tool.label, state.armedTool!.displays)
        : tool.label;
      button.disabled = state.busy;
      button.addEventListener("click", () => this.onToggle(tool));
      this.root.appendChild(button);
    }
  }
}
