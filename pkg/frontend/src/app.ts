/** Browser entry point: bootstrap a session, mirror the document, render.
 *
 * The mirror only changes through received patches; a revision gap (missed
 * message) or a dropped channel triggers a full re-bootstrap, and connection
 * failures surface as a banner with a retry button.
 */

import { ClientDocument, RevisionGapError } from "./state.js";
import { freshViewState, renderDocument } from "./render.js";
import { Channel, TransportOptions, openChannel } from "./transport.js";
import type { ServerMessage } from "./types.js";

export interface AppOptions extends TransportOptions {
  openUrl?: (url: string) => void;
}

export interface App {
  document(): ClientDocument;
  sessionCount(): number;
  stop(): void;
}

export async function startApp(root: HTMLElement, options: AppOptions = {}): Promise<App> {
  const dom = root.ownerDocument;
  const openUrl = options.openUrl ?? ((url: string) => void window.open(url, "_blank"));
  const view = freshViewState();

  let channel: Channel | null = null;
  let doc: ClientDocument | null = null;
  let sessions = 0;
  let stopped = false;

  const banner = dom.createElement("div");
  banner.id = "banner";
  banner.style.display = "none";
  const mount = dom.createElement("div");
  mount.id = "app-mount";
  root.textContent = "";
  root.append(banner, mount);

  function showBanner(text: string, retry: boolean): void {
    banner.textContent = "";
    banner.style.display = "block";
    banner.className = "banner-error";
    banner.appendChild(dom.createTextNode(text));
    if (retry) {
      const button = dom.createElement("button");
      button.id = "retry";
      button.textContent = "retry";
      button.addEventListener("click", () => void bootstrap());
      banner.appendChild(button);
    }
  }

  function render(): void {
    if (!doc || !channel) return;
    renderDocument(mount, doc, view, {
      sendEvent: (model, event, payload) => channel!.send(model, event, payload),
      openUrl,
    });
  }

  function onMessage(msg: ServerMessage): void {
    if (msg.kind === "patch") {
      try {
        doc!.applyPatch(msg);
      } catch (err) {
        if (err instanceof RevisionGapError) {
          void bootstrap(); // missed a message: refetch the whole document
          return;
        }
        throw err;
      }
      render();
    } else if (msg.kind === "error") {
      showBanner(`server error: ${msg.code}${msg.detail ? ` (${msg.detail})` : ""}`, false);
    } else if (msg.kind === "close") {
      showBanner(`session closed: ${msg.reason ?? ""}`, true);
    }
  }

  async function bootstrap(): Promise<void> {
    if (stopped) return;
    if (channel) {
      channel.close();
      channel = null;
    }
    try {
      channel = await openChannel(options);
    } catch (err) {
      showBanner(`connection failed: ${(err as Error).message}`, true);
      return;
    }
    sessions += 1;
    banner.style.display = "none";
    doc = new ClientDocument(channel.document);
    channel.onMessage(onMessage);
    channel.onDrop(() => {
      if (!stopped) showBanner("connection lost", true);
    });
    render();
  }

  await bootstrap();
  return {
    document: () => {
      if (!doc) throw new Error("not bootstrapped");
      return doc;
    },
    sessionCount: () => sessions,
    stop: () => {
      stopped = true;
      if (channel) channel.close();
    },
  };
}
