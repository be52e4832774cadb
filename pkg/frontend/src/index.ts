import { ServiceClient } from "./api.js";
import { SessionConsole } from "./app.js";

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const client = new ServiceClient("");
  const params = new URLSearchParams(window.location.search);
  const existing = params.get("session");
  const ui = new SessionConsole(root, { client });
  if (existing) {
    ui.connect(existing);
    return;
  }
  const form = document.getElementById("start-form") as HTMLFormElement | null;
  form?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const text = (document.getElementById("start-text") as HTMLInputElement).value;
    if (text.trim()) {
      void ui.start({ text: text.trim() });
      form.style.display = "none";
    }
  });
}

boot();
