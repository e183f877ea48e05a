import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // The integration suite spawns a live bridge process.
    testTimeout: 20000,
    hookTimeout: 20000,
  },
});
