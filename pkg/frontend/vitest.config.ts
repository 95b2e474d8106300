import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: ["tests/server.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
