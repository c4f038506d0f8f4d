import { describe, expect, it } from "vitest";

import {
  DEFAULT_ENDPOINT,
  endpointUrl,
  parseEndpoint,
} from "../src/connection.js";

describe("parseEndpoint", () => {
  it("reads host and port from the query string", () => {
    expect(parseEndpoint("?host=rover.local&port=9001")).toEqual({
      host: "rover.local",
      port: 9001,
    });
  });

  it("falls back to defaults", () => {
    expect(parseEndpoint("")).toEqual(DEFAULT_ENDPOINT);
    expect(parseEndpoint("?port=banana")).toEqual(DEFAULT_ENDPOINT);
    expect(parseEndpoint("?port=-3")).toEqual(DEFAULT_ENDPOINT);
  });
});

describe("endpointUrl", () => {
  it("builds the websocket URL", () => {
    expect(endpointUrl({ host: "localhost", port: 8008 })).toBe(
      "ws://localhost:8008/ws",
    );
  });
});
