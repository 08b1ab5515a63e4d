import { BrokerApi } from "./api.js";
import { App } from "./app.js";

// Same-origin by default; a <meta name="broker-base"> tag overrides it
// when the bundle is hosted away from the broker.
const base =
  document.querySelector<HTMLMetaElement>('meta[name="broker-base"]')?.content ??
  "";

const root = document.getElementById("app");
if (root) {
  new App(root, new BrokerApi(base)).start();
}
