import { App } from "./app.js";

window.addEventListener("DOMContentLoaded", () => {
  const app = new App();
  void app.init();
});
