/** Script tag entry: mount the app on #app once the page is ready. */

import { startApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  void startApp(root);
}
